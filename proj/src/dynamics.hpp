#pragma once

#include <Eigen/Core>
#include <vector>

#include "eigen_solve.hpp"
#include "fractional.hpp"
#include "sna.hpp"

namespace flode {

enum class Scheme { heat, schrodinger };

// Sign of the imaginary unit in the Schrodinger update. The shipped
// algorithm uses -i; the equation as written uses +i.
enum class SchrodingerSign { plus, minus };

// Diagonal channel mixing matrix. Heat requires a real diagonal.
struct ChannelMixer {
  Eigen::VectorXcd diag_w;
  Scheme scheme = Scheme::heat;
};

ChannelMixer make_channel_mixer(Eigen::VectorXcd diag_w, Scheme scheme);

struct TrajectoryRecord {
  long step = 0;
  double raw_energy = 0.0;
  double normalized_energy = 0.0;
  double feature_norm = 0.0;
};

struct EnergyTrajectory {
  long steps = 0;
  double h = 0.0;
  std::vector<TrajectoryRecord> records;
};

// One explicit Euler update. Heat: x - h S^a x W. Schrodinger:
// x -/+ i h S^a x W per the sign flag.
Eigen::MatrixXd euler_heat_step(const Eigen::MatrixXd& x,
                                const FractionalOperator& op,
                                const ChannelMixer& w, double h);
Eigen::MatrixXcd euler_heat_step(const Eigen::MatrixXcd& x,
                                 const FractionalOperator& op,
                                 const ChannelMixer& w, double h);
Eigen::MatrixXcd euler_schrodinger_step(const Eigen::MatrixXcd& x,
                                        const FractionalOperator& op,
                                        const ChannelMixer& w, double h,
                                        SchrodingerSign sign);

struct EvolveOptions {
  long steps = 1;
  long record_every = 1;
  // Renormalizing to unit Frobenius norm every step keeps HFD trajectories
  // inside the float range; normalized energy is invariant to it.
  bool renormalize = true;
  SchrodingerSign sign = SchrodingerSign::minus;
};

struct EvolveResult {
  FeatureMatrix final_state;
  EnergyTrajectory trajectory;
};

EvolveResult evolve(const SnaMatrix& sna, const FractionalOperator& op,
                    const ChannelMixer& w, const Eigen::MatrixXcd& x0,
                    double h, const EvolveOptions& options);

// Closed-form reference solution: vec(x)(t) = exp(-t W^T (x) S^a) vec(x0)
// for heat, +/- i t generator for Schrodinger. Materializes the NK x NK
// generator; capped at N*K <= 4096.
Eigen::MatrixXcd closed_form_solution(const FractionalOperator& op,
                                      const ChannelMixer& w,
                                      const Eigen::MatrixXcd& x0, double t,
                                      SchrodingerSign sign = SchrodingerSign::minus);

enum class GraphClass { undirected_or_normal, directed_alpha1 };
enum class Regime { hfd, lfd, lambda_fd };

struct DominanceReport {
  Regime regime = Regime::lfd;
  double limit_lambda = 0.0;     // eigenvalue of I - S whose half is the limit
  double predicted_limit = 0.0;  // limit_lambda / 2
  double lhs = 0.0;              // deciding inequality, left side
  double rhs = 0.0;              // right side; margin = lhs - rhs
  double margin = 0.0;
  bool condition_met = false;    // lhs < rhs
  bool indeterminate = false;    // |margin| below the tie threshold
  bool lambda1_unique = true;    // directed branch: min-Re eigenvalue unique
  double lambda1_re = 0.0;       // spectra endpoints used by the inequality
  double lambdaN_re = 0.0;
  double lambda_plus = 0.0;      // alpha < 0 branch only
  double lambda_minus = 0.0;
  double w_low = 0.0;            // W endpoints (Re for heat, Im for Schrodinger)
  double w_high = 0.0;
  Scheme scheme = Scheme::heat;
  double alpha = 1.0;
  GraphClass graph_class = GraphClass::undirected_or_normal;
};

inline constexpr double kTieEpsilon = 1e-9;

// Evaluates the frequency-dominance inequality for the requested branch and
// reports the predicted normalized-energy limit. directed_alpha1 requires
// the heat scheme and alpha == 1; Schrodinger requires some nonzero
// imaginary part in W.
DominanceReport predict_dominance(const Spectrum& sna_spectrum,
                                  const ChannelMixer& w, double alpha,
                                  GraphClass graph_class,
                                  SchrodingerSign sign = SchrodingerSign::minus);

struct StepGuard {
  double max_h = 0.0;
  bool unbounded = false;   // W == 0
  bool degenerate = false;  // zero frequency gap
  double epsilon = 0.0;     // Schrodinger frequency gap
};

// Largest step size for which the discrete dominance statements hold:
// 1/||W|| for heat, eps/||W||^2 for Schrodinger with eps the gap between
// the dominant frequency and the rest of the finite frequency set.
StepGuard euler_step_size_guard(const ChannelMixer& w,
                                const Spectrum& sna_spectrum, double alpha,
                                SchrodingerSign sign = SchrodingerSign::minus);

// Vanilla graph-convolution iteration x <- S x W_t (no residual); energies
// recorded per layer. w_per_layer is cycled when shorter than layers.
EnergyTrajectory gcn_evolve(const SnaMatrix& sna, const Eigen::MatrixXd& x0,
                            const std::vector<Eigen::VectorXd>& w_per_layer,
                            long layers, long record_every = 1);

enum class TrajectoryVerdict { confirmed, refuted, undecided };

// Confirmed when the last 10% of records sit within tol of the predicted
// limit; refuted when they stabilized (spread < tol/10) somewhere else;
// undecided otherwise. Needs >= 100 records.
TrajectoryVerdict classify_trajectory(const EnergyTrajectory& trajectory,
                                      const DominanceReport& report,
                                      double tol);

}  // namespace flode
