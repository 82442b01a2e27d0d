#include "flode/flode.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "datasets.hpp"
#include "dynamics.hpp"
#include "eigen_solve.hpp"
#include "error.hpp"
#include "fractional.hpp"
#include "graph.hpp"
#include "model.hpp"
#include "nlohmann/json.hpp"
#include "rng.hpp"
#include "sna.hpp"
#include "svd.hpp"
#include "verify.hpp"

using json = nlohmann::json;

struct flode_graph {
  flode::DirectedGraph g;
};
struct flode_sna {
  flode::SnaMatrix sna;
};
struct flode_spectrum {
  flode::Spectrum spectrum;
};
struct flode_factors {
  std::shared_ptr<const flode::SnaFactors> factors;
};
struct flode_operator {
  flode::FractionalOperator op;
};
struct flode_trajectory {
  flode::EnergyTrajectory trajectory;
};
struct flode_dataset {
  flode::Dataset ds;
};
struct flode_model {
  flode::FlodeModel model;
};

namespace {

thread_local std::string g_last_error;

flode_status status_of(flode::ErrorCode code) {
  using flode::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument:
      return FLODE_ERR_INVALID_ARGUMENT;
    case ErrorCode::parse_error:
      return FLODE_ERR_PARSE;
    case ErrorCode::dimension_mismatch:
      return FLODE_ERR_DIMENSION;
    case ErrorCode::numeric_failure:
      return FLODE_ERR_NUMERIC;
    case ErrorCode::io_error:
      return FLODE_ERR_IO;
    case ErrorCode::unsupported:
      return FLODE_ERR_UNSUPPORTED;
  }
  return FLODE_ERR_INTERNAL;
}

template <typename Fn>
flode_status wrap(Fn&& fn) {
  try {
    fn();
    return FLODE_OK;
  } catch (const flode::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FLODE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FLODE_ERR_INTERNAL;
  }
}

flode_status invalid(const char* message) {
  g_last_error = message;
  return FLODE_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Eigen::MatrixXcd matrix_from(const double* re, const double* im, int rows,
                             int cols) {
  if (!re || rows < 1 || cols < 1)
    flode::fail(flode::ErrorCode::invalid_argument, "null/empty feature matrix");
  Eigen::MatrixXcd x(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const std::size_t idx = static_cast<std::size_t>(c) * rows + r;
      x(r, c) = std::complex<double>(re[idx], im ? im[idx] : 0.0);
    }
  if (!x.allFinite())
    flode::fail(flode::ErrorCode::invalid_argument,
                "feature matrix has NaN/Inf entries");
  return x;
}

void matrix_to(const Eigen::MatrixXcd& x, double* out_re, double* out_im) {
  for (long c = 0; c < x.cols(); ++c)
    for (long r = 0; r < x.rows(); ++r) {
      const std::size_t idx = static_cast<std::size_t>(c) * x.rows() + r;
      out_re[idx] = x(r, c).real();
      if (out_im) out_im[idx] = x(r, c).imag();
    }
}

flode::DegreePolicy policy_from(flode_degree_policy p) {
  switch (p) {
    case FLODE_DEGREE_ERROR:
      return flode::DegreePolicy::error_on_zero;
    case FLODE_DEGREE_PSEUDO_INVERSE:
      return flode::DegreePolicy::pseudo_inverse;
    case FLODE_DEGREE_SELF_LOOP:
      return flode::DegreePolicy::self_loop;
  }
  flode::fail(flode::ErrorCode::invalid_argument, "unknown degree policy");
}

flode::Scheme scheme_from(flode_scheme s) {
  return s == FLODE_SCHEME_HEAT ? flode::Scheme::heat
                                : flode::Scheme::schrodinger;
}

flode::SchrodingerSign sign_from(flode_sign s) {
  return s == FLODE_SIGN_PLUS ? flode::SchrodingerSign::plus
                              : flode::SchrodingerSign::minus;
}

flode::ChannelMixer mixer_from(const double* w_re, const double* w_im,
                               int channels, flode_scheme scheme) {
  if (!w_re || channels < 1)
    flode::fail(flode::ErrorCode::invalid_argument, "null/empty channel mixer");
  Eigen::VectorXcd w(channels);
  for (int i = 0; i < channels; ++i)
    w(i) = std::complex<double>(w_re[i], w_im ? w_im[i] : 0.0);
  return flode::make_channel_mixer(std::move(w), scheme_from(scheme));
}

void dominance_to(const flode::DominanceReport& r, flode_dominance* out) {
  out->regime = r.regime == flode::Regime::hfd
                    ? FLODE_REGIME_HFD
                    : (r.regime == flode::Regime::lfd ? FLODE_REGIME_LFD
                                                      : FLODE_REGIME_LAMBDA_FD);
  out->limit_lambda = r.limit_lambda;
  out->predicted_limit = r.predicted_limit;
  out->lhs = r.lhs;
  out->rhs = r.rhs;
  out->margin = r.margin;
  out->condition_met = r.condition_met ? 1 : 0;
  out->indeterminate = r.indeterminate ? 1 : 0;
  out->lambda1_unique = r.lambda1_unique ? 1 : 0;
  out->lambda1_re = r.lambda1_re;
  out->lambdaN_re = r.lambdaN_re;
  out->lambda_plus = r.lambda_plus;
  out->lambda_minus = r.lambda_minus;
  out->w_low = r.w_low;
  out->w_high = r.w_high;
}

flode::DominanceReport dominance_from(const flode_dominance* in) {
  flode::DominanceReport r;
  r.regime = in->regime == FLODE_REGIME_HFD
                 ? flode::Regime::hfd
                 : (in->regime == FLODE_REGIME_LFD ? flode::Regime::lfd
                                                   : flode::Regime::lambda_fd);
  r.limit_lambda = in->limit_lambda;
  r.predicted_limit = in->predicted_limit;
  r.lhs = in->lhs;
  r.rhs = in->rhs;
  r.margin = in->margin;
  r.condition_met = in->condition_met != 0;
  r.indeterminate = in->indeterminate != 0;
  r.lambda1_unique = in->lambda1_unique != 0;
  r.lambda1_re = in->lambda1_re;
  r.lambdaN_re = in->lambdaN_re;
  r.lambda_plus = in->lambda_plus;
  r.lambda_minus = in->lambda_minus;
  r.w_low = in->w_low;
  r.w_high = in->w_high;
  return r;
}

const std::vector<int>* dataset_split(const flode::Dataset& ds, int which) {
  if (!ds.splits) return nullptr;
  switch (which) {
    case 0:
      return &ds.splits->train;
    case 1:
      return &ds.splits->val;
    case 2:
      return &ds.splits->test;
    default:
      return nullptr;
  }
}

int dataset_num_classes(const flode::Dataset& ds) {
  int classes = 0;
  for (int label : ds.labels) classes = std::max(classes, label + 1);
  return classes;
}

}  // namespace

extern "C" {

const char* flode_version(void) { return "0.1.0"; }

const char* flode_last_error(void) { return g_last_error.c_str(); }

void flode_string_free(char* s) { std::free(s); }

/* ---------------- graphs ---------------- */

flode_status flode_graph_from_edge_list(const char* text, int num_nodes,
                                        flode_graph** out) {
  if (!text || !out) return invalid("null argument");
  return wrap([&] {
    auto g = std::make_unique<flode_graph>();
    g->g = flode::load_edge_list(
        text, num_nodes < 0 ? std::nullopt : std::optional<int>(num_nodes));
    *out = g.release();
  });
}

flode_status flode_graph_load_file(const char* path, int num_nodes,
                                   flode_graph** out) {
  if (!path || !out) return invalid("null argument");
  return wrap([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      flode::fail(flode::ErrorCode::io_error,
                  std::string("cannot open ") + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto g = std::make_unique<flode_graph>();
    g->g = flode::load_edge_list(
        buf.str(),
        num_nodes < 0 ? std::nullopt : std::optional<int>(num_nodes));
    *out = g.release();
  });
}

flode_status flode_graph_cycle(int n, flode_graph** out) {
  if (!out) return invalid("null argument");
  return wrap([&] {
    *out = new flode_graph{flode::cycle_graph(n)};
  });
}

flode_status flode_graph_directed_cycle(int n, flode_graph** out) {
  if (!out) return invalid("null argument");
  return wrap([&] { *out = new flode_graph{flode::directed_cycle(n)}; });
}

flode_status flode_graph_complete(int n, flode_graph** out) {
  if (!out) return invalid("null argument");
  return wrap([&] { *out = new flode_graph{flode::complete_graph(n)}; });
}

flode_status flode_graph_erdos_renyi(int n, double p, int directed,
                                     uint64_t seed, flode_graph** out) {
  if (!out) return invalid("null argument");
  return wrap([&] {
    *out = new flode_graph{flode::erdos_renyi(n, p, directed != 0, seed)};
  });
}

flode_status flode_graph_to_undirected(const flode_graph* g,
                                       flode_graph** out) {
  if (!g || !out) return invalid("null argument");
  return wrap([&] { *out = new flode_graph{flode::to_undirected(g->g)}; });
}

flode_status flode_graph_add_self_loops(const flode_graph* g,
                                        flode_graph** out) {
  if (!g || !out) return invalid("null argument");
  return wrap([&] { *out = new flode_graph{flode::add_self_loops(g->g)}; });
}

flode_status flode_graph_largest_component(const flode_graph* g, int strong,
                                           flode_graph** out) {
  if (!g || !out) return invalid("null argument");
  return wrap([&] {
    auto result = flode::largest_connected_component(
        g->g, strong ? flode::ComponentMode::strong
                     : flode::ComponentMode::weak);
    *out = new flode_graph{std::move(result.graph)};
  });
}

int flode_graph_num_nodes(const flode_graph* g) {
  return g ? g->g.num_nodes : 0;
}

int64_t flode_graph_num_edges(const flode_graph* g) {
  return g ? static_cast<int64_t>(g->g.num_edges()) : 0;
}

int flode_graph_is_directed(const flode_graph* g) {
  return g && g->g.directed ? 1 : 0;
}

int flode_graph_is_balanced(const flode_graph* g) {
  return g && flode::is_balanced(g->g) ? 1 : 0;
}

flode_status flode_graph_set_labels(flode_graph* g, const int* labels,
                                    int count) {
  if (!g || !labels) return invalid("null argument");
  return wrap([&] {
    if (count != g->g.num_nodes)
      flode::fail(flode::ErrorCode::dimension_mismatch,
                  "label count does not match node count");
    g->g.labels.assign(labels, labels + count);
  });
}

int flode_graph_has_labels(const flode_graph* g) {
  return g && g->g.has_labels() ? 1 : 0;
}

flode_status flode_graph_homophily(const flode_graph* g, int symmetrized,
                                   double* value, int* excluded) {
  if (!g || !value) return invalid("null argument");
  return wrap([&] {
    const flode::HomophilyResult r = symmetrized
                                         ? flode::symmetrized_homophily(g->g)
                                         : flode::homophily(g->g);
    *value = r.value;
    if (excluded) *excluded = r.excluded_nodes;
  });
}

flode_status flode_graph_distances(const flode_graph* g, int* out) {
  if (!g || !out) return invalid("null argument");
  return wrap([&] {
    const Eigen::MatrixXi d = flode::shortest_path_distances(g->g);
    for (long c = 0; c < d.cols(); ++c)
      for (long r = 0; r < d.rows(); ++r)
        out[static_cast<std::size_t>(c) * d.rows() + r] = d(r, c);
  });
}

void flode_graph_free(flode_graph* g) { delete g; }

/* ---------------- SNA ---------------- */

flode_status flode_sna_build(const flode_graph* g, flode_degree_policy policy,
                             flode_sna** out) {
  if (!g || !out) return invalid("null argument");
  return wrap([&] {
    *out = new flode_sna{flode::build_sna(g->g, policy_from(policy))};
  });
}

int flode_sna_num_nodes(const flode_sna* sna) {
  return sna ? sna->sna.num_nodes() : 0;
}

flode_status flode_sna_entry(const flode_sna* sna, int row, int col,
                             double* out) {
  if (!sna || !out) return invalid("null argument");
  return wrap([&] {
    if (row < 0 || col < 0 || row >= sna->sna.num_nodes() ||
        col >= sna->sna.num_nodes())
      flode::fail(flode::ErrorCode::invalid_argument, "entry out of range");
    *out = sna->sna.matrix(row, col);
  });
}

flode_status flode_sna_weak_balance_gap(const flode_sna* sna, double* out) {
  if (!sna || !out) return invalid("null argument");
  return wrap([&] { *out = flode::weak_balance_gap(sna->sna); });
}

flode_status flode_sna_normality_defect(const flode_sna* sna, double* out) {
  if (!sna || !out) return invalid("null argument");
  return wrap([&] { *out = flode::normality_defect(sna->sna); });
}

flode_status flode_sna_spectrum(const flode_sna* sna, flode_spectrum** out) {
  if (!sna || !out) return invalid("null argument");
  return wrap([&] {
    *out = new flode_spectrum{flode::eigen_spectrum(sna->sna.matrix, false)};
  });
}

flode_status flode_dirichlet_energy(const flode_graph* g, const double* re,
                                    const double* im, int rows, int cols,
                                    double* out) {
  if (!g || !out) return invalid("null argument");
  return wrap([&] {
    *out = flode::dirichlet_energy(g->g, matrix_from(re, im, rows, cols));
  });
}

flode_status flode_dirichlet_energy_trace(const flode_sna* sna,
                                          const double* re, const double* im,
                                          int rows, int cols, double* out) {
  if (!sna || !out) return invalid("null argument");
  return wrap([&] {
    *out = flode::dirichlet_energy_trace(sna->sna,
                                         matrix_from(re, im, rows, cols));
  });
}

flode_status flode_normalized_dirichlet_energy(const flode_sna* sna,
                                               const double* re,
                                               const double* im, int rows,
                                               int cols, double* out) {
  if (!sna || !out) return invalid("null argument");
  return wrap([&] {
    *out = flode::normalized_dirichlet_energy(sna->sna,
                                              matrix_from(re, im, rows, cols));
  });
}

void flode_sna_free(flode_sna* sna) { delete sna; }

int flode_spectrum_size(const flode_spectrum* s) {
  return s ? static_cast<int>(s->spectrum.eigenvalues.size()) : 0;
}

flode_status flode_spectrum_eigenvalue(const flode_spectrum* s, int index,
                                       double* re, double* im) {
  if (!s || !re) return invalid("null argument");
  return wrap([&] {
    if (index < 0 || index >= s->spectrum.eigenvalues.size())
      flode::fail(flode::ErrorCode::invalid_argument, "index out of range");
    *re = s->spectrum.eigenvalues(index).real();
    if (im) *im = s->spectrum.eigenvalues(index).imag();
  });
}

void flode_spectrum_free(flode_spectrum* s) { delete s; }

/* ---------------- SVD / operator ---------------- */

flode_status flode_svd_full(const flode_sna* sna, flode_factors** out) {
  if (!sna || !out) return invalid("null argument");
  return wrap([&] {
    *out = new flode_factors{
        std::make_shared<flode::SnaFactors>(flode::svd_full(sna->sna))};
  });
}

flode_status flode_svd_truncated(const flode_sna* sna, int rank, uint64_t seed,
                                 flode_factors** out) {
  if (!sna || !out) return invalid("null argument");
  return wrap([&] {
    *out = new flode_factors{std::make_shared<flode::SnaFactors>(
        flode::svd_truncated(sna->sna, rank, seed))};
  });
}

int flode_factors_rank(const flode_factors* f) {
  return f ? f->factors->rank() : 0;
}

int flode_factors_is_truncated(const flode_factors* f) {
  return f && f->factors->truncated ? 1 : 0;
}

flode_status flode_factors_singular_values(const flode_factors* f,
                                           double* out) {
  if (!f || !out) return invalid("null argument");
  return wrap([&] {
    for (int i = 0; i < f->factors->rank(); ++i) out[i] = f->factors->sigma(i);
  });
}

flode_status flode_factors_explained_variance(const flode_factors* f, int k,
                                              double* out) {
  if (!f || !out) return invalid("null argument");
  return wrap([&] { *out = flode::explained_variance(*f->factors, k); });
}

flode_status flode_factors_save(const flode_factors* f, const char* path) {
  if (!f || !path) return invalid("null argument");
  return wrap([&] { flode::save_factors(*f->factors, path); });
}

flode_status flode_factors_load(const char* path, flode_factors** out) {
  if (!path || !out) return invalid("null argument");
  return wrap([&] {
    *out = new flode_factors{
        std::make_shared<flode::SnaFactors>(flode::load_factors(path))};
  });
}

flode_status flode_factors_cache_key(const flode_graph* g,
                                     flode_degree_policy policy, int rank,
                                     uint64_t seed, char** out) {
  if (!g || !out) return invalid("null argument");
  return wrap([&] {
    *out = dup_string(flode::factors_cache_key(
        flode::graph_hash(g->g), policy_from(policy), rank, seed));
  });
}

void flode_factors_free(flode_factors* f) { delete f; }

flode_status flode_operator_create(const flode_factors* f, double alpha,
                                   flode_operator** out) {
  if (!f || !out) return invalid("null argument");
  return wrap([&] {
    *out = new flode_operator{flode::fractional_operator(f->factors, alpha)};
  });
}

flode_status flode_operator_apply(const flode_operator* op, const double* re,
                                  const double* im, int rows, int cols,
                                  double* out_re, double* out_im) {
  if (!op || !out_re) return invalid("null argument");
  return wrap([&] {
    const Eigen::MatrixXcd y =
        flode::apply(op->op, matrix_from(re, im, rows, cols));
    if (!out_im && y.imag().cwiseAbs().maxCoeff() > 0.0)
      flode::fail(flode::ErrorCode::invalid_argument,
                  "complex result needs an imaginary output buffer");
    matrix_to(y, out_re, out_im);
  });
}

flode_status flode_operator_entry(const flode_operator* op, int row, int col,
                                  double* out) {
  if (!op || !out) return invalid("null argument");
  return wrap([&] {
    const int n = op->op.num_nodes();
    if (row < 0 || col < 0 || row >= n || col >= n)
      flode::fail(flode::ErrorCode::invalid_argument, "entry out of range");
    const auto u = op->op.factors->u.leftCols(op->op.active_rank);
    const auto v = op->op.factors->v.leftCols(op->op.active_rank);
    *out = u.row(row).cwiseProduct(v.row(col)).cwiseProduct(
               op->op.sigma_alpha.transpose())
               .sum();
  });
}

flode_status flode_operator_bound_report(const flode_operator* op,
                                         const flode_graph* g, char** out) {
  if (!op || !g || !out) return invalid("null argument");
  return wrap([&] {
    const flode::FractionalBoundReport r =
        flode::verify_fractional_bound(g->g, *op->op.factors, op->op.alpha);
    json j;
    j["alpha"] = op->op.alpha;
    j["max_ratio"] = r.max_ratio;
    j["max_ratio_symmetrized"] = r.max_ratio_symmetrized;
    j["worst_src"] = r.worst_src;
    j["worst_dst"] = r.worst_dst;
    j["worst_distance"] = r.worst_distance;
    j["max_unreachable_entry"] = r.max_unreachable_entry;
    j["sigma1"] = r.sigma1;
    j["sigma1_exceeds_one"] = r.sigma1_exceeds_one;
    j["pairs_checked"] = r.pairs_checked;
    *out = dup_string(j.dump(2));
  });
}

void flode_operator_free(flode_operator* op) { delete op; }

/* ---------------- dynamics ---------------- */

flode_status flode_predict_dominance(const flode_spectrum* sna_spectrum,
                                     const double* w_re, const double* w_im,
                                     int channels, flode_scheme scheme,
                                     double alpha,
                                     flode_graph_class graph_class,
                                     flode_sign sign, flode_dominance* out) {
  if (!sna_spectrum || !out) return invalid("null argument");
  return wrap([&] {
    const flode::ChannelMixer w = mixer_from(w_re, w_im, channels, scheme);
    const flode::DominanceReport r = flode::predict_dominance(
        sna_spectrum->spectrum, w, alpha,
        graph_class == FLODE_CLASS_DIRECTED_ALPHA1
            ? flode::GraphClass::directed_alpha1
            : flode::GraphClass::undirected_or_normal,
        sign_from(sign));
    dominance_to(r, out);
  });
}

flode_status flode_step_size_guard(const flode_spectrum* sna_spectrum,
                                   const double* w_re, const double* w_im,
                                   int channels, flode_scheme scheme,
                                   double alpha, flode_sign sign,
                                   double* max_h, int* unbounded,
                                   int* degenerate, double* epsilon) {
  if (!sna_spectrum || !max_h) return invalid("null argument");
  return wrap([&] {
    const flode::ChannelMixer w = mixer_from(w_re, w_im, channels, scheme);
    const flode::StepGuard guard = flode::euler_step_size_guard(
        w, sna_spectrum->spectrum, alpha, sign_from(sign));
    *max_h = guard.max_h;
    if (unbounded) *unbounded = guard.unbounded ? 1 : 0;
    if (degenerate) *degenerate = guard.degenerate ? 1 : 0;
    if (epsilon) *epsilon = guard.epsilon;
  });
}

flode_status flode_evolve(const flode_sna* sna, const flode_operator* op,
                          const double* w_re, const double* w_im, int channels,
                          flode_scheme scheme, flode_sign sign,
                          const double* x0_re, const double* x0_im, int rows,
                          int cols, double h, int64_t steps,
                          int64_t record_every, int renormalize,
                          flode_trajectory** out) {
  if (!sna || !op || !out) return invalid("null argument");
  return wrap([&] {
    const flode::ChannelMixer w = mixer_from(w_re, w_im, channels, scheme);
    flode::EvolveOptions options;
    options.steps = steps;
    options.record_every = record_every;
    options.renormalize = renormalize != 0;
    options.sign = sign_from(sign);
    flode::EvolveResult result =
        flode::evolve(sna->sna, op->op, w, matrix_from(x0_re, x0_im, rows, cols),
                      h, options);
    *out = new flode_trajectory{std::move(result.trajectory)};
  });
}

flode_status flode_closed_form(const flode_operator* op, const double* w_re,
                               const double* w_im, int channels,
                               flode_scheme scheme, flode_sign sign,
                               const double* x0_re, const double* x0_im,
                               int rows, int cols, double t, double* out_re,
                               double* out_im) {
  if (!op || !out_re) return invalid("null argument");
  return wrap([&] {
    const flode::ChannelMixer w = mixer_from(w_re, w_im, channels, scheme);
    const Eigen::MatrixXcd xt = flode::closed_form_solution(
        op->op, w, matrix_from(x0_re, x0_im, rows, cols), t, sign_from(sign));
    if (!out_im && xt.imag().cwiseAbs().maxCoeff() > 1e-14)
      flode::fail(flode::ErrorCode::invalid_argument,
                  "complex result needs an imaginary output buffer");
    matrix_to(xt, out_re, out_im);
  });
}

flode_status flode_gcn_evolve(const flode_sna* sna, const double* x0,
                              int rows, int cols, const double* w_diag,
                              int64_t layers, int64_t record_every,
                              flode_trajectory** out) {
  if (!sna || !x0 || !w_diag || !out) return invalid("null argument");
  return wrap([&] {
    const Eigen::MatrixXcd x = matrix_from(x0, nullptr, rows, cols);
    Eigen::VectorXd w(cols);
    for (int i = 0; i < cols; ++i) w(i) = w_diag[i];
    *out = new flode_trajectory{flode::gcn_evolve(
        sna->sna, x.real(), {w}, layers, record_every)};
  });
}

int64_t flode_trajectory_num_records(const flode_trajectory* t) {
  return t ? static_cast<int64_t>(t->trajectory.records.size()) : 0;
}

flode_status flode_trajectory_record(const flode_trajectory* t, int64_t index,
                                     int64_t* step, double* raw_energy,
                                     double* normalized_energy,
                                     double* feature_norm) {
  if (!t) return invalid("null argument");
  return wrap([&] {
    if (index < 0 ||
        index >= static_cast<int64_t>(t->trajectory.records.size()))
      flode::fail(flode::ErrorCode::invalid_argument, "record out of range");
    const flode::TrajectoryRecord& rec =
        t->trajectory.records[static_cast<std::size_t>(index)];
    if (step) *step = rec.step;
    if (raw_energy) *raw_energy = rec.raw_energy;
    if (normalized_energy) *normalized_energy = rec.normalized_energy;
    if (feature_norm) *feature_norm = rec.feature_norm;
  });
}

flode_status flode_classify_trajectory(const flode_trajectory* t,
                                       const flode_dominance* report,
                                       double tol, flode_verdict* out) {
  if (!t || !report || !out) return invalid("null argument");
  return wrap([&] {
    const flode::TrajectoryVerdict v = flode::classify_trajectory(
        t->trajectory, dominance_from(report), tol);
    *out = v == flode::TrajectoryVerdict::confirmed
               ? FLODE_VERDICT_CONFIRMED
               : (v == flode::TrajectoryVerdict::refuted
                      ? FLODE_VERDICT_REFUTED
                      : FLODE_VERDICT_UNDECIDED);
  });
}

void flode_trajectory_free(flode_trajectory* t) { delete t; }

/* ---------------- datasets ---------------- */

flode_status flode_dsbm_generate(const flode_dsbm_config* config,
                                 flode_dataset** out) {
  if (!config || !out) return invalid("null argument");
  return wrap([&] {
    flode::DsbmConfig c;
    c.num_nodes = config->num_nodes;
    c.num_clusters = config->num_clusters;
    c.alpha_intra = config->alpha_intra;
    c.alpha_inter = config->alpha_inter;
    c.beta_intra = config->beta_intra;
    c.beta_param = config->beta_param;
    c.seed = config->seed;
    *out = new flode_dataset{flode::dsbm_generate(c)};
  });
}

flode_status flode_dataset_load(const char* dir, const char* options_json,
                                flode_dataset** out) {
  if (!dir || !out) return invalid("null argument");
  return wrap([&] {
    flode::LoadOptions options;
    if (options_json && *options_json) {
      json j;
      try {
        j = json::parse(options_json);
      } catch (const json::parse_error& e) {
        flode::fail(flode::ErrorCode::parse_error,
                    std::string("options JSON: ") + e.what());
      }
      if (j.contains("largest_component"))
        options.largest_component = j.at("largest_component").get<bool>();
      if (j.contains("component_mode"))
        options.component_mode =
            j.at("component_mode").get<std::string>() == "strong"
                ? flode::ComponentMode::strong
                : flode::ComponentMode::weak;
      if (j.contains("make_undirected"))
        options.make_undirected = j.at("make_undirected").get<bool>();
      if (j.contains("self_loops"))
        options.self_loops = j.at("self_loops").get<bool>();
      if (j.contains("normalize")) {
        const std::string mode = j.at("normalize").get<std::string>();
        if (mode == "row_l2")
          options.normalize = flode::NormalizeMode::row_l2;
        else if (mode == "standardize")
          options.normalize = flode::NormalizeMode::standardize;
        else
          flode::fail(flode::ErrorCode::invalid_argument,
                      "unknown normalize mode: " + mode);
      }
    }
    *out = new flode_dataset{flode::load_dataset(dir, options)};
  });
}

flode_status flode_dataset_export(const flode_dataset* ds, const char* dir) {
  if (!ds || !dir) return invalid("null argument");
  return wrap([&] { flode::export_dataset(ds->ds, dir); });
}

flode_status flode_dataset_make_splits(flode_dataset* ds, uint64_t seed) {
  if (!ds) return invalid("null argument");
  return wrap([&] {
    if (ds->ds.labels.empty())
      flode::fail(flode::ErrorCode::invalid_argument,
                  "splits need node labels");
    ds->ds.splits = flode::dsbm_splits(ds->ds.labels, seed);
  });
}

int flode_dataset_num_nodes(const flode_dataset* ds) {
  return ds ? ds->ds.graph.num_nodes : 0;
}

int flode_dataset_feature_dim(const flode_dataset* ds) {
  return ds ? static_cast<int>(ds->ds.features.cols()) : 0;
}

int flode_dataset_num_classes(const flode_dataset* ds) {
  return ds ? dataset_num_classes(ds->ds) : 0;
}

flode_status flode_dataset_graph(const flode_dataset* ds, flode_graph** out) {
  if (!ds || !out) return invalid("null argument");
  return wrap([&] { *out = new flode_graph{ds->ds.graph}; });
}

flode_status flode_dataset_features(const flode_dataset* ds, double* out) {
  if (!ds || !out) return invalid("null argument");
  return wrap([&] {
    const Eigen::MatrixXd& x = ds->ds.features;
    for (long c = 0; c < x.cols(); ++c)
      for (long r = 0; r < x.rows(); ++r)
        out[static_cast<std::size_t>(c) * x.rows() + r] = x(r, c);
  });
}

flode_status flode_dataset_labels(const flode_dataset* ds, int* out) {
  if (!ds || !out) return invalid("null argument");
  return wrap([&] {
    if (ds->ds.labels.empty())
      flode::fail(flode::ErrorCode::invalid_argument, "dataset has no labels");
    std::copy(ds->ds.labels.begin(), ds->ds.labels.end(), out);
  });
}

flode_status flode_dataset_split(const flode_dataset* ds, int which, int* out,
                                 int* count) {
  if (!ds || !count) return invalid("null argument");
  return wrap([&] {
    const std::vector<int>* split = dataset_split(ds->ds, which);
    if (!split)
      flode::fail(flode::ErrorCode::invalid_argument,
                  "dataset has no such split");
    *count = static_cast<int>(split->size());
    if (out) std::copy(split->begin(), split->end(), out);
  });
}

flode_status flode_dataset_provenance(const flode_dataset* ds, char** out) {
  if (!ds || !out) return invalid("null argument");
  return wrap([&] {
    std::ostringstream text;
    for (const auto& line : ds->ds.provenance) text << line << '\n';
    *out = dup_string(text.str());
  });
}

void flode_dataset_free(flode_dataset* ds) { delete ds; }

/* ---------------- model ---------------- */

flode_status flode_model_create(const char* config_json,
                                const flode_factors* factors, int in_dim,
                                int num_classes, uint64_t seed,
                                flode_model** out) {
  if (!config_json || !factors || !out) return invalid("null argument");
  return wrap([&] {
    const flode::ModelConfig config =
        flode::ModelConfig::from_json(config_json);
    *out = new flode_model{
        flode::init_model(config, factors->factors, in_dim, num_classes, seed)};
  });
}

flode_status flode_model_train(flode_model* model, const flode_dataset* ds,
                               char** history_csv, double* best_val_acc,
                               double* test_acc) {
  if (!model || !ds) return invalid("null argument");
  return wrap([&] {
    if (!ds->ds.splits)
      flode::fail(flode::ErrorCode::invalid_argument,
                  "dataset has no splits; call flode_dataset_make_splits");
    flode::SplitIndices splits;
    splits.train = ds->ds.splits->train;
    splits.val = ds->ds.splits->val;
    splits.test = ds->ds.splits->test;
    flode::TrainResult result = flode::train(std::move(model->model),
                                             ds->ds.features, ds->ds.labels,
                                             splits);
    model->model = std::move(result.model);
    if (history_csv) {
      std::ostringstream csv;
      csv << "epoch,train_loss,train_acc,val_acc,test_acc\n";
      csv.precision(10);
      for (const auto& rec : result.history)
        csv << rec.epoch << ',' << rec.train_loss << ',' << rec.train_acc
            << ',' << rec.val_acc << ',' << rec.test_acc << '\n';
      *history_csv = dup_string(csv.str());
    }
    if (best_val_acc) *best_val_acc = result.best_val_acc;
    if (test_acc)
      *test_acc = splits.test.empty()
                      ? 0.0
                      : flode::evaluate(model->model, ds->ds.features,
                                        ds->ds.labels, splits.test);
    if (result.diverged)
      flode::fail(flode::ErrorCode::numeric_failure,
                  "training diverged (NaN loss); history retained");
  });
}

flode_status flode_model_evaluate(const flode_model* model,
                                  const flode_dataset* ds, const int* mask,
                                  int mask_len, double* accuracy) {
  if (!model || !ds || !mask || !accuracy) return invalid("null argument");
  return wrap([&] {
    const std::vector<int> m(mask, mask + mask_len);
    *accuracy =
        flode::evaluate(model->model, ds->ds.features, ds->ds.labels, m);
  });
}

flode_status flode_model_logits(const flode_model* model,
                                const flode_dataset* ds, double* out) {
  if (!model || !ds || !out) return invalid("null argument");
  return wrap([&] {
    flode::Rng rng(0);
    const Eigen::MatrixXd logits =
        flode::forward(model->model, ds->ds.features, false, rng);
    for (long c = 0; c < logits.cols(); ++c)
      for (long r = 0; r < logits.rows(); ++r)
        out[static_cast<std::size_t>(c) * logits.rows() + r] = logits(r, c);
  });
}

flode_status flode_model_gradient_check(const flode_model* model,
                                        const flode_dataset* ds,
                                        double* max_rel_error) {
  if (!model || !ds || !max_rel_error) return invalid("null argument");
  return wrap([&] {
    std::vector<int> mask;
    if (ds->ds.splits && !ds->ds.splits->train.empty()) {
      mask = ds->ds.splits->train;
    } else {
      mask.resize(ds->ds.graph.num_nodes);
      for (int i = 0; i < ds->ds.graph.num_nodes; ++i) mask[i] = i;
    }
    *max_rel_error = flode::gradient_check(model->model, ds->ds.features,
                                           ds->ds.labels, mask);
  });
}

flode_status flode_model_dominance_audit(const flode_model* model,
                                         const flode_spectrum* sna_spectrum,
                                         flode_dominance* out) {
  if (!model || !sna_spectrum || !out) return invalid("null argument");
  return wrap([&] {
    dominance_to(flode::dominance_audit(model->model, sna_spectrum->spectrum),
                 out);
  });
}

flode_status flode_model_params_json(const flode_model* model, char** out) {
  if (!model || !out) return invalid("null argument");
  return wrap([&] {
    const flode::FlodeModel& m = model->model;
    json j;
    j["alpha"] = m.alpha;
    j["h_re"] = m.h.real();
    j["h_im"] = m.h.imag();
    j["w_re_min"] = m.diag_w.real().minCoeff();
    j["w_re_max"] = m.diag_w.real().maxCoeff();
    j["w_im_min"] = m.diag_w.imag().minCoeff();
    j["w_im_max"] = m.diag_w.imag().maxCoeff();
    j["num_parameters"] = m.num_parameters();
    *out = dup_string(j.dump(2));
  });
}

flode_status flode_model_save(const flode_model* model, const char* path) {
  if (!model || !path) return invalid("null argument");
  return wrap([&] { flode::save_checkpoint(model->model, path); });
}

flode_status flode_model_load(const char* path, const flode_factors* factors,
                              flode_model** out) {
  if (!path || !factors || !out) return invalid("null argument");
  return wrap([&] {
    *out = new flode_model{flode::load_checkpoint(path, factors->factors)};
  });
}

void flode_model_free(flode_model* model) { delete model; }

/* ---------------- verification ---------------- */

flode_status flode_verify_run(const char* names, uint64_t seed,
                              int inject_fault, char** results_json,
                              int* all_passed) {
  if (!names) return invalid("null argument");
  return wrap([&] {
    std::vector<std::string> selected;
    std::istringstream in(names);
    std::string token;
    while (std::getline(in, token, ','))
      if (!token.empty()) selected.push_back(token);
    flode::VerifyOptions options;
    options.seed = seed;
    options.inject_fault = inject_fault != 0;
    const std::vector<flode::CheckResult> results =
        flode::run_verification(selected, options);
    json j = json::array();
    bool ok = true;
    for (const auto& r : results) {
      ok = ok && r.passed;
      j.push_back({{"name", r.name},
                   {"passed", r.passed},
                   {"detail", r.detail},
                   {"seconds", r.seconds}});
    }
    if (results_json) *results_json = dup_string(j.dump(2));
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

flode_status flode_verify_suite_names(char** csv_out) {
  if (!csv_out) return invalid("null argument");
  return wrap([&] {
    std::ostringstream out;
    bool first = true;
    for (const auto& name : flode::verification_suites()) {
      if (!first) out << ',';
      out << name;
      first = false;
    }
    *csv_out = dup_string(out.str());
  });
}

flode_status flode_seeded_normals(uint64_t seed, int count, double* out) {
  if (!out || count < 0) return invalid("null argument");
  return wrap([&] {
    flode::Rng rng(seed);
    for (int i = 0; i < count; ++i) out[i] = rng.normal();
  });
}

flode_status flode_seeded_uniform(uint64_t seed, int count, double lo,
                                  double hi, double* out) {
  if (!out || count < 0) return invalid("null argument");
  return wrap([&] {
    flode::Rng rng(seed);
    for (int i = 0; i < count; ++i) out[i] = rng.uniform(lo, hi);
  });
}

} /* extern "C" */
