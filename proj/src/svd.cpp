#include "svd.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <bit>
#include <fstream>

#include "error.hpp"
#include "rng.hpp"

namespace flode {

namespace {

// Largest-modulus entry of every U column made positive; first index wins
// ties so the gauge is unambiguous.
void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (long c = 0; c < u.cols(); ++c) {
    long arg = 0;
    double best = -1.0;
    for (long r = 0; r < u.rows(); ++r) {
      const double a = std::abs(u(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (u(arg, c) < 0.0) {
      u.col(c) = -u.col(c);
      v.col(c) = -v.col(c);
    }
  }
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

static_assert(std::endian::native == std::endian::little,
              "factor container is defined little-endian");

void write_doubles(std::ofstream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) fail(ErrorCode::io_error, "truncated factor container");
}

constexpr char kMagic[4] = {'F', 'L', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

SnaFactors svd_full(const SnaMatrix& sna) {
  if (!sna.matrix.allFinite())
    fail(ErrorCode::invalid_argument, "SVD input has non-finite entries");
  SnaFactors f;
  if (sna.num_nodes() <= 32) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        sna.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    f.u = svd.matrixU();
    f.sigma = svd.singularValues();
    f.v = svd.matrixV();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(
        sna.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    f.u = svd.matrixU();
    f.sigma = svd.singularValues();
    f.v = svd.matrixV();
  }
  f.truncated = false;
  if (!f.u.allFinite() || !f.sigma.allFinite() || !f.v.allFinite())
    fail(ErrorCode::numeric_failure, "SVD iteration did not converge");
  fix_signs(f.u, f.v);
  return f;
}

SnaFactors svd_truncated(const SnaMatrix& sna, int rank, std::uint64_t seed) {
  const int n = sna.num_nodes();
  if (rank < 1 || rank > n)
    fail(ErrorCode::invalid_argument,
         "truncation rank must lie in [1, " + std::to_string(n) + "]");

  constexpr int kOversampling = 10;
  constexpr int kPowerIterations = 2;
  const int cols = std::min(n, rank + kOversampling);

  Rng rng(seed);
  Eigen::MatrixXd omega(n, cols);
  for (long c = 0; c < omega.cols(); ++c)
    for (long r = 0; r < omega.rows(); ++r) omega(r, c) = rng.normal();

  const Eigen::MatrixXd& s = sna.matrix;
  Eigen::MatrixXd q = orthonormalize(s * omega);
  for (int it = 0; it < kPowerIterations; ++it) {
    q = orthonormalize(s.transpose() * q);
    q = orthonormalize(s * q);
  }

  const Eigen::MatrixXd b = q.transpose() * s;  // cols x n
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      b, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SnaFactors f;
  f.u = (q * svd.matrixU()).leftCols(rank);
  f.sigma = svd.singularValues().head(rank);
  f.v = svd.matrixV().leftCols(rank);
  f.truncated = true;
  fix_signs(f.u, f.v);
  return f;
}

double explained_variance(const SnaFactors& factors, int k) {
  if (factors.truncated)
    fail(ErrorCode::invalid_argument,
         "explained variance needs the full singular spectrum");
  if (k < 0 || k > factors.rank())
    fail(ErrorCode::invalid_argument, "explained variance rank out of range");
  const double total = factors.sigma.squaredNorm();
  if (total == 0.0) return k == factors.rank() ? 1.0 : 0.0;
  return factors.sigma.head(k).squaredNorm() / total;
}

void save_factors(const SnaFactors& factors, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t version = kVersion;
  const std::uint64_t n = static_cast<std::uint64_t>(factors.u.rows());
  const std::uint64_t k = static_cast<std::uint64_t>(factors.rank());
  const std::uint8_t truncated = factors.truncated ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&k), sizeof(k));
  out.write(reinterpret_cast<const char*>(&truncated), sizeof(truncated));
  // Row-major on disk.
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor u = factors.u;
  const RowMajor v = factors.v;
  write_doubles(out, u.data(), u.size());
  write_doubles(out, factors.sigma.data(), factors.sigma.size());
  write_doubles(out, v.data(), v.size());
  if (!out) fail(ErrorCode::io_error, "failed writing " + path.string());
}

SnaFactors load_factors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    fail(ErrorCode::io_error, "not a factor container: " + path.string());
  std::uint32_t version = 0;
  std::uint64_t n = 0, k = 0;
  std::uint8_t truncated = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&k), sizeof(k));
  in.read(reinterpret_cast<char*>(&truncated), sizeof(truncated));
  if (!in || version != kVersion)
    fail(ErrorCode::io_error, "unsupported factor container version");
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor u(n, k), v(n, k);
  Eigen::VectorXd sigma(k);
  read_doubles(in, u.data(), u.size());
  read_doubles(in, sigma.data(), sigma.size());
  read_doubles(in, v.data(), v.size());
  SnaFactors f;
  f.u = u;
  f.sigma = sigma;
  f.v = v;
  f.truncated = truncated != 0;
  return f;
}

std::string factors_cache_key(std::uint64_t graph_hash, DegreePolicy policy,
                              int rank, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%016llx-p%d-k%d-s%016llx",
                static_cast<unsigned long long>(graph_hash),
                static_cast<int>(policy), rank,
                static_cast<unsigned long long>(seed));
  return buf;
}

}  // namespace flode
