#include "fractional.hpp"

#include <cmath>

#include "error.hpp"

namespace flode {

FractionalOperator fractional_operator(std::shared_ptr<const SnaFactors> factors,
                                       double alpha) {
  if (!factors) fail(ErrorCode::invalid_argument, "null factors");
  if (!std::isfinite(alpha))
    fail(ErrorCode::invalid_argument, "exponent must be finite");

  const Eigen::VectorXd& sigma = factors->sigma;
  const double drop_tol = kSigmaDropRel * factors->sigma_max();

  FractionalOperator op;
  op.alpha = alpha;
  op.factors = std::move(factors);

  if (alpha > 0.0) {
    op.active_rank = op.factors->rank();
    op.sigma_alpha.resize(op.active_rank);
    for (int i = 0; i < op.active_rank; ++i)
      op.sigma_alpha(i) = sigma(i) <= drop_tol ? 0.0 : std::pow(sigma(i), alpha);
  } else {
    // sigma sorted nonincreasing, so the kept prefix is contiguous.
    int kept = 0;
    while (kept < op.factors->rank() && sigma(kept) > drop_tol) ++kept;
    if (kept == 0)
      fail(ErrorCode::invalid_argument,
           "all singular values vanish; nonpositive exponent undefined");
    op.active_rank = kept;
    op.sigma_alpha.resize(kept);
    for (int i = 0; i < kept; ++i) op.sigma_alpha(i) = std::pow(sigma(i), alpha);
  }
  return op;
}

namespace {

void check_rows(const FractionalOperator& op, long rows) {
  if (rows != op.num_nodes())
    fail(ErrorCode::dimension_mismatch,
         "operator is " + std::to_string(op.num_nodes()) + "-dimensional, got " +
             std::to_string(rows) + " feature rows");
}

}  // namespace

Eigen::MatrixXd apply(const FractionalOperator& op, const Eigen::MatrixXd& x) {
  check_rows(op, x.rows());
  const auto u = op.factors->u.leftCols(op.active_rank);
  const auto v = op.factors->v.leftCols(op.active_rank);
  return u * (op.sigma_alpha.asDiagonal() * (v.transpose() * x));
}

Eigen::MatrixXcd apply(const FractionalOperator& op, const Eigen::MatrixXcd& x) {
  check_rows(op, x.rows());
  const auto u = op.factors->u.leftCols(op.active_rank);
  const auto v = op.factors->v.leftCols(op.active_rank);
  return u * (op.sigma_alpha.asDiagonal() * (v.transpose() * x));
}

Eigen::MatrixXd dense(const FractionalOperator& op) {
  const auto u = op.factors->u.leftCols(op.active_rank);
  const auto v = op.factors->v.leftCols(op.active_rank);
  return u * op.sigma_alpha.asDiagonal() * v.transpose();
}

FractionalBoundReport verify_fractional_bound(const DirectedGraph& g,
                                              const SnaFactors& factors,
                                              double alpha) {
  if (!(alpha > 0.0))
    fail(ErrorCode::invalid_argument, "the edge-weight bound needs alpha > 0");
  if (factors.truncated)
    fail(ErrorCode::invalid_argument,
         "the edge-weight bound applies to the exact operator, not a truncation");
  if (factors.num_nodes() != g.num_nodes)
    fail(ErrorCode::dimension_mismatch, "factors do not match the graph");

  FractionalBoundReport report;
  report.sigma1 = factors.sigma_max();
  report.sigma1_exceeds_one = report.sigma1 > 1.0 + 1e-12;

  FractionalOperator op;
  op.alpha = alpha;
  op.sigma_alpha.resize(factors.rank());
  const double drop_tol = kSigmaDropRel * factors.sigma_max();
  for (int i = 0; i < factors.rank(); ++i)
    op.sigma_alpha(i) =
        factors.sigma(i) <= drop_tol ? 0.0 : std::pow(factors.sigma(i), alpha);

  const Eigen::MatrixXd entries =
      factors.u * op.sigma_alpha.asDiagonal() * factors.v.transpose();
  const Eigen::MatrixXi dist = shortest_path_distances(g);
  const Eigen::MatrixXi dist_sym =
      g.directed ? shortest_path_distances(to_undirected(g)) : dist;
  const double front = 1.0 + 0.5 * M_PI * M_PI;

  for (int i = 0; i < g.num_nodes; ++i) {
    for (int j = 0; j < g.num_nodes; ++j) {
      const int d_sym = dist_sym(i, j);
      if (d_sym >= 2 && d_sym != kUnreachable) {
        const double bound_sym =
            front * std::pow(report.sigma1 / (2.0 * (d_sym - 1)), alpha);
        report.max_ratio_symmetrized = std::max(
            report.max_ratio_symmetrized, std::abs(entries(i, j)) / bound_sym);
      }
      const int d = dist(i, j);
      if (d == kUnreachable) {
        if (i != j)
          report.max_unreachable_entry =
              std::max(report.max_unreachable_entry, std::abs(entries(i, j)));
        continue;
      }
      if (d < 2) continue;
      const double bound =
          front * std::pow(report.sigma1 / (2.0 * (d - 1)), alpha);
      const double ratio = std::abs(entries(i, j)) / bound;
      ++report.pairs_checked;
      if (ratio > report.max_ratio) {
        report.max_ratio = ratio;
        report.worst_dst = i;
        report.worst_src = j;
        report.worst_distance = d;
      }
    }
  }
  return report;
}

}  // namespace flode
