#pragma once

#include <Eigen/Core>
#include <memory>

#include "graph.hpp"
#include "svd.hpp"

namespace flode {

// Relative threshold under which a singular value counts as zero when the
// exponent is nonpositive (those directions are removed from the operator).
inline constexpr double kSigmaDropRel = 1e-12;

// S^alpha = U diag(sigma^alpha) V^T acting through the factors; the dense
// matrix is only materialized on demand. For alpha > 0, 0^alpha := 0; for
// alpha <= 0, zero singular values are dropped and the rank shrinks.
struct FractionalOperator {
  double alpha = 1.0;
  std::shared_ptr<const SnaFactors> factors;
  Eigen::VectorXd sigma_alpha;  // length = active rank
  int active_rank = 0;

  int num_nodes() const { return factors->num_nodes(); }
};

FractionalOperator fractional_operator(std::shared_ptr<const SnaFactors> factors,
                                       double alpha);

// y = U (sigma^alpha ⊙ (V^T x)); never materializes the dense operator.
Eigen::MatrixXd apply(const FractionalOperator& op, const Eigen::MatrixXd& x);
Eigen::MatrixXcd apply(const FractionalOperator& op, const Eigen::MatrixXcd& x);

Eigen::MatrixXd dense(const FractionalOperator& op);

struct FractionalBoundReport {
  double max_ratio = 0.0;           // |entry| / bound over reachable pairs, d >= 2
  int worst_src = -1;               // j of the worst (i, j)
  int worst_dst = -1;               // i of the worst (i, j)
  int worst_distance = 0;
  double max_unreachable_entry = 0.0;
  // Same ratio with d measured on the symmetrized graph: the metric the
  // SVD-calculus approximants (odd polynomials M (M^T M)^k, alternating-walk
  // support) actually control. Coincides with max_ratio for undirected
  // graphs.
  double max_ratio_symmetrized = 0.0;
  double sigma1 = 0.0;
  bool sigma1_exceeds_one = false;
  long pairs_checked = 0;
};

// Checks |(S^alpha)_{i,j}| <= (1 + pi^2/2) (sigma1 / (2 (d(i,j) - 1)))^alpha
// over every ordered pair with 2 <= d(i,j) < inf. Pairs at infinite distance
// are reported separately through max_unreachable_entry. Requires alpha > 0
// and non-truncated factors.
FractionalBoundReport verify_fractional_bound(const DirectedGraph& g,
                                              const SnaFactors& factors,
                                              double alpha);

}  // namespace flode
