#pragma once

#include <Eigen/Core>
#include <complex>

#include "graph.hpp"

namespace flode {

// Node feature matrix, complex capable. real_only asserts max |Im| == 0
// exactly and enables the real fast paths.
struct FeatureMatrix {
  Eigen::MatrixXcd values;
  bool real_only = true;

  static FeatureMatrix from_real(const Eigen::MatrixXd& x);
  static FeatureMatrix from_complex(Eigen::MatrixXcd x);
  Eigen::MatrixXd real_values() const;
  long rows() const { return values.rows(); }
  long cols() const { return values.cols(); }
};

enum class DegreePolicy { error_on_zero, pseudo_inverse, self_loop };

// Dense both-sided normalization S = D_in^{-1/2} A D_out^{-1/2}. The policy
// controls zero in/out degrees: error_on_zero rejects them, pseudo_inverse
// uses 1/sqrt(0) := 0 (sparsity of S equals sparsity of A), self_loop adds
// self-loops everywhere before normalizing.
struct SnaMatrix {
  Eigen::MatrixXd matrix;
  DegreePolicy policy = DegreePolicy::error_on_zero;
  bool symmetric = false;

  int num_nodes() const { return static_cast<int>(matrix.rows()); }
};

SnaMatrix build_sna(const DirectedGraph& g, DegreePolicy policy);

// Sum form: E(x) = 1/4 sum_{(j->i)} || x_i / sqrt(d_i^in) - x_j / sqrt(d_j^out) ||^2.
// Every edge endpoint must have nonzero in/out degree respectively (always
// true for the endpoints an edge touches).
double dirichlet_energy(const DirectedGraph& g, const Eigen::MatrixXcd& x);
double dirichlet_energy(const DirectedGraph& g, const Eigen::MatrixXd& x);

// Trace form: E(x) = 1/2 Re trace(x^H (I - S) x).
double dirichlet_energy_trace(const SnaMatrix& sna, const Eigen::MatrixXcd& x);
double dirichlet_energy_trace(const SnaMatrix& sna, const Eigen::MatrixXd& x);

// Trace-form energy of x / ||x||_F; rejects zero x. Lands in [0, ||I-S||/2].
double normalized_dirichlet_energy(const SnaMatrix& sna,
                                   const Eigen::MatrixXcd& x);
double normalized_dirichlet_energy(const SnaMatrix& sna,
                                   const Eigen::MatrixXd& x);

// min over eigenvalues of |lambda - 1|; vanishes exactly on weakly balanced
// graphs.
double weak_balance_gap(const SnaMatrix& sna);

// || S S^T - S^T S ||_F.
double normality_defect(const SnaMatrix& sna);

}  // namespace flode
