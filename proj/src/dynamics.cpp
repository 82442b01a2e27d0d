#include "dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "expm.hpp"

namespace flode {

namespace {

constexpr double kZeroEigTol = 1e-12;

// Phase-preserving fractional power, sign(x)|x|^a on the reals.
double pow_signed(double x, double alpha) {
  if (x == 0.0) return 0.0;
  return x > 0.0 ? std::pow(x, alpha) : -std::pow(-x, alpha);
}

// Re(pow_a(lambda)) = |lambda|^(a-1) Re(lambda); reduces to pow_signed for
// real eigenvalues.
double repow(std::complex<double> lambda, double alpha) {
  const double mod = std::abs(lambda);
  if (mod == 0.0) return 0.0;
  return std::pow(mod, alpha - 1.0) * lambda.real();
}

void require_heat_real(const ChannelMixer& w) {
  if (w.scheme == Scheme::heat &&
      w.diag_w.imag().cwiseAbs().maxCoeff() != 0.0)
    fail(ErrorCode::invalid_argument,
         "heat channel mixing must be a real diagonal");
}

std::complex<double> schrodinger_unit(SchrodingerSign sign) {
  return sign == SchrodingerSign::plus ? std::complex<double>(0.0, 1.0)
                                       : std::complex<double>(0.0, -1.0);
}

double norm_w(const ChannelMixer& w) {
  return w.diag_w.size() ? w.diag_w.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

ChannelMixer make_channel_mixer(Eigen::VectorXcd diag_w, Scheme scheme) {
  ChannelMixer w;
  w.diag_w = std::move(diag_w);
  w.scheme = scheme;
  require_heat_real(w);
  return w;
}

Eigen::MatrixXd euler_heat_step(const Eigen::MatrixXd& x,
                                const FractionalOperator& op,
                                const ChannelMixer& w, double h) {
  require_heat_real(w);
  if (x.cols() != w.diag_w.size())
    fail(ErrorCode::dimension_mismatch, "feature/channel count mismatch");
  const Eigen::VectorXd wr = w.diag_w.real();
  return x - h * (apply(op, x) * wr.asDiagonal());
}

Eigen::MatrixXcd euler_heat_step(const Eigen::MatrixXcd& x,
                                 const FractionalOperator& op,
                                 const ChannelMixer& w, double h) {
  require_heat_real(w);
  if (x.cols() != w.diag_w.size())
    fail(ErrorCode::dimension_mismatch, "feature/channel count mismatch");
  const Eigen::VectorXd wr = w.diag_w.real();
  return x - h * (apply(op, x) * wr.asDiagonal()).eval();
}

Eigen::MatrixXcd euler_schrodinger_step(const Eigen::MatrixXcd& x,
                                        const FractionalOperator& op,
                                        const ChannelMixer& w, double h,
                                        SchrodingerSign sign) {
  if (x.cols() != w.diag_w.size())
    fail(ErrorCode::dimension_mismatch, "feature/channel count mismatch");
  const std::complex<double> unit = schrodinger_unit(sign);
  return x + (unit * h) * (apply(op, x) * w.diag_w.asDiagonal()).eval();
}

EvolveResult evolve(const SnaMatrix& sna, const FractionalOperator& op,
                    const ChannelMixer& w, const Eigen::MatrixXcd& x0,
                    double h, const EvolveOptions& options) {
  if (options.steps < 1)
    fail(ErrorCode::invalid_argument, "evolve needs steps >= 1");
  if (!(h > 0.0)) fail(ErrorCode::invalid_argument, "step size must be > 0");
  const long record_every = std::max<long>(1, options.record_every);

  Eigen::MatrixXcd x = x0;
  EnergyTrajectory traj;
  traj.steps = options.steps;
  traj.h = h;

  auto record = [&](long step) {
    TrajectoryRecord rec;
    rec.step = step;
    rec.feature_norm = x.norm();
    rec.raw_energy = dirichlet_energy_trace(sna, x);
    rec.normalized_energy = normalized_dirichlet_energy(sna, x);
    traj.records.push_back(rec);
  };

  record(0);
  if (options.renormalize) x /= x.norm();

  for (long step = 1; step <= options.steps; ++step) {
    x = w.scheme == Scheme::heat
            ? euler_heat_step(x, op, w, h)
            : euler_schrodinger_step(x, op, w, h, options.sign);
    if (!x.allFinite())
      fail(ErrorCode::numeric_failure,
           "non-finite features at step " + std::to_string(step));
    if (step % record_every == 0 || step == options.steps) record(step);
    if (options.renormalize) {
      const double norm = x.norm();
      if (!(norm > 0.0))
        fail(ErrorCode::numeric_failure,
             "features vanished at step " + std::to_string(step));
      x /= norm;
    }
  }

  EvolveResult result;
  result.final_state = FeatureMatrix::from_complex(std::move(x));
  result.trajectory = std::move(traj);
  return result;
}

Eigen::MatrixXcd closed_form_solution(const FractionalOperator& op,
                                      const ChannelMixer& w,
                                      const Eigen::MatrixXcd& x0, double t,
                                      SchrodingerSign sign) {
  const long n = x0.rows();
  const long k = x0.cols();
  if (n * k > 4096)
    fail(ErrorCode::invalid_argument,
         "closed-form oracle capped at N*K <= 4096");
  if (k != w.diag_w.size())
    fail(ErrorCode::dimension_mismatch, "feature/channel count mismatch");
  require_heat_real(w);

  const Eigen::MatrixXd s_alpha = dense(op);
  const std::complex<double> factor =
      w.scheme == Scheme::heat ? std::complex<double>(-1.0, 0.0)
                               : schrodinger_unit(sign);

  // vec is column-major, so x' = S^a x W vectorizes with W^T (x) S^a; W is
  // diagonal, so the generator is block diagonal.
  Eigen::MatrixXcd generator(n * k, n * k);
  generator.setZero();
  for (long c = 0; c < k; ++c)
    generator.block(c * n, c * n, n, n) =
        (factor * t * w.diag_w(c)) * s_alpha.cast<std::complex<double>>();

  const Eigen::MatrixXcd propagator = expm(generator);
  const Eigen::VectorXcd vec_x0 =
      Eigen::Map<const Eigen::VectorXcd>(x0.data(), n * k);
  const Eigen::VectorXcd vec_xt = propagator * vec_x0;
  return Eigen::Map<const Eigen::MatrixXcd>(vec_xt.data(), n, k);
}

namespace {

struct WEndpoints {
  double low = 0.0;
  double high = 0.0;
};

// Eigenvalues of the diagonal W, reduced to the ordering key the theorems
// use: real parts for heat, imaginary parts for Schrodinger (after mapping
// the -i convention onto +i by negating W).
WEndpoints w_endpoints(const ChannelMixer& w, SchrodingerSign sign) {
  WEndpoints e;
  if (w.scheme == Scheme::heat) {
    const Eigen::VectorXd re = w.diag_w.real();
    e.low = re.minCoeff();
    e.high = re.maxCoeff();
  } else {
    Eigen::VectorXd im = w.diag_w.imag();
    if (sign == SchrodingerSign::minus) im = -im;
    e.low = im.minCoeff();
    e.high = im.maxCoeff();
  }
  return e;
}

}  // namespace

DominanceReport predict_dominance(const Spectrum& sna_spectrum,
                                  const ChannelMixer& w, double alpha,
                                  GraphClass graph_class,
                                  SchrodingerSign sign) {
  if (w.diag_w.size() == 0)
    fail(ErrorCode::invalid_argument, "empty channel mixing matrix");
  require_heat_real(w);
  if (w.scheme == Scheme::schrodinger &&
      w.diag_w.imag().cwiseAbs().maxCoeff() == 0.0)
    fail(ErrorCode::invalid_argument,
         "Schrodinger dominance needs an eigenvalue of W with nonzero "
         "imaginary part");
  if (graph_class == GraphClass::directed_alpha1) {
    if (w.scheme != Scheme::heat)
      fail(ErrorCode::unsupported,
           "directed dominance is only characterized for the heat scheme");
    if (alpha != 1.0)
      fail(ErrorCode::unsupported,
           "directed dominance is only characterized for alpha = 1");
  }

  const Eigen::VectorXcd& lam = sna_spectrum.eigenvalues;
  if (lam.size() == 0)
    fail(ErrorCode::invalid_argument, "empty spectrum");

  DominanceReport report;
  report.scheme = w.scheme;
  report.alpha = alpha;
  report.graph_class = graph_class;
  const WEndpoints we = w_endpoints(w, sign);
  report.w_low = we.low;
  report.w_high = we.high;

  const std::complex<double> lambda1 = lam(0);
  const std::complex<double> lambdaN = lam(lam.size() - 1);
  report.lambda1_re = lambda1.real();
  report.lambdaN_re = lambdaN.real();
  report.lambda_plus = std::numeric_limits<double>::quiet_NaN();
  report.lambda_minus = std::numeric_limits<double>::quiet_NaN();

  if (graph_class == GraphClass::directed_alpha1) {
    report.lambda1_unique = true;
    for (long i = 1; i < lam.size(); ++i)
      if (std::abs(lam(i).real() - lambda1.real()) < kTieEpsilon &&
          std::abs(lam(i) - lambda1) > kTieEpsilon) {
        report.lambda1_unique = false;
        break;
      }
    // Conjugate pairs share the real part and also break uniqueness.
    if (lam.size() > 1 &&
        std::abs(lam(1).real() - lambda1.real()) < kTieEpsilon)
      report.lambda1_unique = false;

    report.lhs = we.high * lambda1.real();
    report.rhs = we.low * lambdaN.real();
    report.margin = report.lhs - report.rhs;
    report.condition_met = report.lhs < report.rhs;
    report.indeterminate = std::abs(report.margin) < kTieEpsilon ||
                           (report.condition_met && !report.lambda1_unique);
    if (report.condition_met) {
      report.regime = Regime::hfd;
      report.limit_lambda = 1.0 - lambda1.real();
    } else {
      report.regime = Regime::lfd;
      report.limit_lambda = 1.0 - lambdaN.real();
    }
    report.predicted_limit = 0.5 * report.limit_lambda;
    return report;
  }

  if (alpha > 0.0) {
    report.lhs = we.high * repow(lambda1, alpha);
    report.rhs = we.low * repow(lambdaN, alpha);
    report.margin = report.lhs - report.rhs;
    report.condition_met = report.lhs < report.rhs;
    report.indeterminate = std::abs(report.margin) < kTieEpsilon;
    if (report.condition_met) {
      report.regime = Regime::hfd;
      report.limit_lambda = 1.0 - lambda1.real();
    } else {
      report.regime = Regime::lfd;
      report.limit_lambda = 1.0 - lambdaN.real();
    }
    report.predicted_limit = 0.5 * report.limit_lambda;
    return report;
  }

  // alpha <= 0: mid-frequency regimes built on the eigenvalues closest to
  // zero from both sides (zero eigenvalues correspond to dropped singular
  // values and are excluded).
  const double zero_tol =
      kZeroEigTol * std::max(std::abs(lambda1), std::abs(lambdaN));
  double lambda_plus = std::numeric_limits<double>::quiet_NaN();
  double lambda_minus = std::numeric_limits<double>::quiet_NaN();
  for (long i = 0; i < lam.size(); ++i) {
    const double value = lam(i).real();
    if (value > zero_tol && (std::isnan(lambda_plus) || value < lambda_plus))
      lambda_plus = value;
    if (value < -zero_tol &&
        (std::isnan(lambda_minus) || value > lambda_minus))
      lambda_minus = value;
  }
  if (std::isnan(lambda_plus))
    fail(ErrorCode::invalid_argument,
         "no positive eigenvalue: the mid-frequency branch is undefined");
  if (std::isnan(lambda_minus))
    fail(ErrorCode::invalid_argument,
         "no negative eigenvalue: the mid-frequency branch is undefined");
  report.lambda_plus = lambda_plus;
  report.lambda_minus = lambda_minus;

  report.lhs = we.high * pow_signed(lambda_minus, alpha);
  report.rhs = we.low * pow_signed(lambda_plus, alpha);
  report.margin = report.lhs - report.rhs;
  report.condition_met = report.lhs < report.rhs;
  report.indeterminate = std::abs(report.margin) < kTieEpsilon;
  report.regime = Regime::lambda_fd;
  report.limit_lambda =
      report.condition_met ? 1.0 - lambda_minus : 1.0 - lambda_plus;
  report.predicted_limit = 0.5 * report.limit_lambda;
  return report;
}

StepGuard euler_step_size_guard(const ChannelMixer& w,
                                const Spectrum& sna_spectrum, double alpha,
                                SchrodingerSign sign) {
  require_heat_real(w);
  StepGuard guard;
  const double wnorm = norm_w(w);
  if (wnorm == 0.0) {
    guard.unbounded = true;
    guard.max_h = std::numeric_limits<double>::infinity();
    return guard;
  }
  if (w.scheme == Scheme::heat) {
    guard.max_h = 1.0 / wnorm;
    return guard;
  }

  // Finite frequency set Im(w_c) * pow_a(lambda_l); the guard needs the gap
  // between the dominant (minimal) frequency and every other value.
  Eigen::VectorXd im = w.diag_w.imag();
  if (sign == SchrodingerSign::minus) im = -im;
  const Eigen::VectorXcd& lam = sna_spectrum.eigenvalues;
  const double scale =
      std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
  const double zero_tol = kZeroEigTol * scale;

  std::vector<double> freqs;
  freqs.reserve(static_cast<std::size_t>(im.size() * lam.size()));
  for (long c = 0; c < im.size(); ++c)
    for (long l = 0; l < lam.size(); ++l) {
      const double mod = std::abs(lam(l));
      if (alpha <= 0.0 && mod <= zero_tol) {
        // Dropped direction: constant component, frequency zero.
        freqs.push_back(0.0);
        continue;
      }
      freqs.push_back(im(c) * repow(lam(l), alpha));
    }
  std::sort(freqs.begin(), freqs.end());
  const double dominant = freqs.front();
  double gap = std::numeric_limits<double>::infinity();
  for (double f : freqs)
    if (f > dominant + kTieEpsilon) {
      gap = f - dominant;
      break;
    }
  if (!std::isfinite(gap) ||
      (freqs.size() > 1 && freqs[1] - dominant <= kTieEpsilon)) {
    guard.degenerate = true;
    guard.max_h = 0.0;
    guard.epsilon = 0.0;
    return guard;
  }
  guard.epsilon = gap;
  guard.max_h = gap / (wnorm * wnorm);
  return guard;
}

EnergyTrajectory gcn_evolve(const SnaMatrix& sna, const Eigen::MatrixXd& x0,
                            const std::vector<Eigen::VectorXd>& w_per_layer,
                            long layers, long record_every) {
  if (w_per_layer.empty())
    fail(ErrorCode::invalid_argument, "gcn_evolve needs at least one W");
  if (layers < 1) fail(ErrorCode::invalid_argument, "layers must be >= 1");
  record_every = std::max<long>(1, record_every);

  Eigen::MatrixXd x = x0;
  EnergyTrajectory traj;
  traj.steps = layers;
  traj.h = 1.0;

  auto record = [&](long step) {
    TrajectoryRecord rec;
    rec.step = step;
    rec.feature_norm = x.norm();
    rec.raw_energy = dirichlet_energy_trace(sna, x);
    rec.normalized_energy = normalized_dirichlet_energy(sna, x);
    traj.records.push_back(rec);
  };

  record(0);
  x /= x.norm();
  for (long t = 1; t <= layers; ++t) {
    const Eigen::VectorXd& wt = w_per_layer[(t - 1) % w_per_layer.size()];
    if (wt.size() != x.cols())
      fail(ErrorCode::dimension_mismatch, "channel mixing width mismatch");
    x = sna.matrix * x * wt.asDiagonal();
    if (!x.allFinite())
      fail(ErrorCode::numeric_failure,
           "non-finite features at layer " + std::to_string(t));
    if (t % record_every == 0 || t == layers) record(t);
    const double norm = x.norm();
    if (!(norm > 0.0))
      fail(ErrorCode::numeric_failure,
           "features vanished at layer " + std::to_string(t));
    x /= norm;
  }
  return traj;
}

TrajectoryVerdict classify_trajectory(const EnergyTrajectory& trajectory,
                                      const DominanceReport& report,
                                      double tol) {
  const auto& records = trajectory.records;
  if (records.size() < 100)
    fail(ErrorCode::invalid_argument,
         "classification needs at least 100 records");
  const std::size_t tail_start = records.size() - records.size() / 10;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool within = true;
  for (std::size_t i = tail_start; i < records.size(); ++i) {
    const double e = records[i].normalized_energy;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    if (std::abs(e - report.predicted_limit) > tol) within = false;
  }
  if (within) return TrajectoryVerdict::confirmed;
  if (hi - lo < tol / 10.0) return TrajectoryVerdict::refuted;
  return TrajectoryVerdict::undecided;
}

}  // namespace flode
