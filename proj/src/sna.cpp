#include "sna.hpp"

#include <cmath>

#include "eigen_solve.hpp"
#include "error.hpp"

namespace flode {

FeatureMatrix FeatureMatrix::from_real(const Eigen::MatrixXd& x) {
  FeatureMatrix f;
  f.values = x.cast<std::complex<double>>();
  f.real_only = true;
  return f;
}

FeatureMatrix FeatureMatrix::from_complex(Eigen::MatrixXcd x) {
  FeatureMatrix f;
  f.real_only = x.imag().cwiseAbs().maxCoeff() == 0.0;
  f.values = std::move(x);
  return f;
}

Eigen::MatrixXd FeatureMatrix::real_values() const {
  if (!real_only)
    fail(ErrorCode::invalid_argument,
         "feature matrix has nonzero imaginary parts");
  return values.real();
}

SnaMatrix build_sna(const DirectedGraph& g, DegreePolicy policy) {
  if (g.num_nodes < 1)
    fail(ErrorCode::invalid_argument, "SNA needs at least one node");

  const DirectedGraph* graph = &g;
  DirectedGraph looped;
  if (policy == DegreePolicy::self_loop) {
    looped = add_self_loops(g);
    graph = &looped;
  }

  const DegreeInfo deg = degrees(*graph);
  if (policy == DegreePolicy::error_on_zero) {
    for (int i = 0; i < graph->num_nodes; ++i)
      if (deg.in_degrees[i] == 0 || deg.out_degrees[i] == 0)
        fail(ErrorCode::invalid_argument,
             "node " + std::to_string(i) +
                 " has zero in- or out-degree (degree policy: error)");
  }

  SnaMatrix sna;
  sna.policy = policy;
  sna.matrix = Eigen::MatrixXd::Zero(graph->num_nodes, graph->num_nodes);
  for (const auto& [u, v] : graph->edges)
    sna.matrix(v, u) =
        1.0 / std::sqrt(double(deg.in_degrees[v]) * double(deg.out_degrees[u]));
  sna.symmetric = sna.matrix == sna.matrix.transpose();
  return sna;
}

namespace {

void check_rows(long expected, long got, const char* what) {
  if (expected != got)
    fail(ErrorCode::dimension_mismatch,
         std::string(what) + ": expected " + std::to_string(expected) +
             " feature rows, got " + std::to_string(got));
}

}  // namespace

double dirichlet_energy(const DirectedGraph& g, const Eigen::MatrixXcd& x) {
  check_rows(g.num_nodes, x.rows(), "dirichlet_energy");
  const DegreeInfo deg = degrees(g);
  double total = 0.0;
  for (const auto& [u, v] : g.edges) {
    // Arc u -> v contributes || x_v / sqrt(d_v^in) - x_u / sqrt(d_u^out) ||^2.
    const double si = 1.0 / std::sqrt(double(deg.in_degrees[v]));
    const double so = 1.0 / std::sqrt(double(deg.out_degrees[u]));
    total += (x.row(v) * si - x.row(u) * so).squaredNorm();
  }
  return 0.25 * total;
}

double dirichlet_energy(const DirectedGraph& g, const Eigen::MatrixXd& x) {
  check_rows(g.num_nodes, x.rows(), "dirichlet_energy");
  const DegreeInfo deg = degrees(g);
  double total = 0.0;
  for (const auto& [u, v] : g.edges) {
    const double si = 1.0 / std::sqrt(double(deg.in_degrees[v]));
    const double so = 1.0 / std::sqrt(double(deg.out_degrees[u]));
    total += (x.row(v) * si - x.row(u) * so).squaredNorm();
  }
  return 0.25 * total;
}

double dirichlet_energy_trace(const SnaMatrix& sna, const Eigen::MatrixXcd& x) {
  check_rows(sna.num_nodes(), x.rows(), "dirichlet_energy_trace");
  const Eigen::MatrixXcd sx = sna.matrix * x;
  const double xx = x.squaredNorm();
  const double xsx = x.cwiseProduct(sx.conjugate()).sum().real();
  return 0.5 * (xx - xsx);
}

double dirichlet_energy_trace(const SnaMatrix& sna, const Eigen::MatrixXd& x) {
  check_rows(sna.num_nodes(), x.rows(), "dirichlet_energy_trace");
  const Eigen::MatrixXd sx = sna.matrix * x;
  return 0.5 * (x.squaredNorm() - x.cwiseProduct(sx).sum());
}

double normalized_dirichlet_energy(const SnaMatrix& sna,
                                   const Eigen::MatrixXcd& x) {
  const double norm2 = x.squaredNorm();
  if (!(norm2 > 0.0))
    fail(ErrorCode::invalid_argument,
         "normalized Dirichlet energy of a zero feature matrix");
  return dirichlet_energy_trace(sna, x) / norm2;
}

double normalized_dirichlet_energy(const SnaMatrix& sna,
                                   const Eigen::MatrixXd& x) {
  const double norm2 = x.squaredNorm();
  if (!(norm2 > 0.0))
    fail(ErrorCode::invalid_argument,
         "normalized Dirichlet energy of a zero feature matrix");
  return dirichlet_energy_trace(sna, x) / norm2;
}

double weak_balance_gap(const SnaMatrix& sna) {
  const Spectrum spec = eigen_spectrum(sna.matrix, false);
  double gap = std::numeric_limits<double>::infinity();
  for (long i = 0; i < spec.eigenvalues.size(); ++i)
    gap = std::min(gap, std::abs(spec.eigenvalues(i) - 1.0));
  return gap;
}

double normality_defect(const SnaMatrix& sna) {
  const Eigen::MatrixXd& s = sna.matrix;
  return (s * s.transpose() - s.transpose() * s).norm();
}

}  // namespace flode
