#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>

#include "sna.hpp"

namespace flode {

// SVD triple of an SNA matrix, S ~ U diag(sigma) V^T with sigma
// nonincreasing. Gauge fixed: the largest-modulus entry of each U column is
// made positive (sign absorbed into the V column too), so factors are
// reproducible and serializable.
struct SnaFactors {
  Eigen::MatrixXd u;      // N x k
  Eigen::VectorXd sigma;  // k, nonincreasing, nonnegative
  Eigen::MatrixXd v;      // N x k
  bool truncated = false;

  int num_nodes() const { return static_cast<int>(u.rows()); }
  int rank() const { return static_cast<int>(sigma.size()); }
  double sigma_max() const { return sigma.size() ? sigma(0) : 0.0; }

  Eigen::MatrixXd reconstruct() const {
    return u * sigma.asDiagonal() * v.transpose();
  }
};

SnaFactors svd_full(const SnaMatrix& sna);

// Halko-style randomized range finder: Gaussian test matrix with 10
// oversampling columns, 2 power iterations with QR re-orthonormalization.
// Deterministic for a fixed seed.
SnaFactors svd_truncated(const SnaMatrix& sna, int rank, std::uint64_t seed);

// sum_{i<k} sigma_i^2 / sum_j sigma_j^2. Needs the full set of singular
// values in the denominator, so it rejects truncated factors.
double explained_variance(const SnaFactors& factors, int k);

// Binary container: magic+version header, dimensions, then row-major
// little-endian doubles for U, sigma, V.
void save_factors(const SnaFactors& factors, const std::filesystem::path& path);
SnaFactors load_factors(const std::filesystem::path& path);

// Cache key for offline SVD preprocessing: graph hash + degree policy +
// rank + seed.
std::string factors_cache_key(std::uint64_t graph_hash, DegreePolicy policy,
                              int rank, std::uint64_t seed);

}  // namespace flode
