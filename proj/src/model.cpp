#include "model.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "autodiff.hpp"
#include "error.hpp"
#include "fractional.hpp"
#include "nlohmann/json.hpp"

namespace flode {

namespace {

using json = nlohmann::json;

std::string scheme_name(Scheme s) {
  return s == Scheme::heat ? "heat" : "schrodinger";
}

Scheme scheme_from(const std::string& s) {
  if (s == "heat") return Scheme::heat;
  if (s == "schrodinger") return Scheme::schrodinger;
  fail(ErrorCode::invalid_argument, "unknown scheme: " + s);
}

std::string sign_name(SchrodingerSign s) {
  return s == SchrodingerSign::plus ? "plus" : "minus";
}

SchrodingerSign sign_from(const std::string& s) {
  if (s == "plus") return SchrodingerSign::plus;
  if (s == "minus") return SchrodingerSign::minus;
  fail(ErrorCode::invalid_argument, "unknown sign: " + s);
}

}  // namespace

std::string ModelConfig::to_json() const {
  json j;
  j["hidden_channels"] = hidden_channels;
  j["num_layers"] = num_layers;
  j["encoder_layers"] = encoder_layers;
  j["decoder_layers"] = decoder_layers;
  j["input_dropout"] = input_dropout;
  j["decoder_dropout"] = decoder_dropout;
  j["scheme"] = scheme_name(scheme);
  j["sign"] = sign_name(sign);
  j["learning_rate"] = learning_rate;
  j["weight_decay"] = weight_decay;
  j["max_epochs"] = max_epochs;
  j["patience"] = patience;
  j["seed"] = seed;
  j["leaky_slope"] = leaky_slope;
  return j.dump(2);
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse_error, std::string("config JSON: ") + e.what());
  }
  ModelConfig c;
  auto get = [&](const char* key, auto& out) {
    if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  get("hidden_channels", c.hidden_channels);
  get("num_layers", c.num_layers);
  get("encoder_layers", c.encoder_layers);
  get("decoder_layers", c.decoder_layers);
  get("input_dropout", c.input_dropout);
  get("decoder_dropout", c.decoder_dropout);
  if (j.contains("scheme")) c.scheme = scheme_from(j.at("scheme"));
  if (j.contains("sign")) c.sign = sign_from(j.at("sign"));
  get("learning_rate", c.learning_rate);
  get("weight_decay", c.weight_decay);
  get("max_epochs", c.max_epochs);
  get("patience", c.patience);
  get("seed", c.seed);
  get("leaky_slope", c.leaky_slope);
  c.validate();
  return c;
}

void ModelConfig::validate() const {
  if (hidden_channels < 1 || num_layers < 1 || encoder_layers < 1 ||
      decoder_layers < 1)
    fail(ErrorCode::invalid_argument, "layer counts must be positive");
  if (input_dropout < 0.0 || input_dropout >= 1.0 || decoder_dropout < 0.0 ||
      decoder_dropout >= 1.0)
    fail(ErrorCode::invalid_argument, "dropout rates must lie in [0, 1)");
  if (!(learning_rate > 0.0))
    fail(ErrorCode::invalid_argument, "learning rate must be positive");
  if (weight_decay < 0.0)
    fail(ErrorCode::invalid_argument, "weight decay must be nonnegative");
  if (max_epochs < 1 || patience < 1)
    fail(ErrorCode::invalid_argument, "max_epochs and patience must be >= 1");
}

namespace {

bool complex_params(const ModelConfig& c) {
  return c.scheme == Scheme::schrodinger;
}

}  // namespace

long FlodeModel::num_parameters() const {
  long n = 0;
  for (const auto& w : enc_w) n += w.size();
  for (const auto& b : enc_b) n += b.size();
  for (const auto& w : dec_w) n += w.size();
  for (const auto& b : dec_b) n += b.size();
  n += 1;                                                 // alpha
  n += complex_params(config) ? 2 : 1;                    // h
  n += diag_w.size() * (complex_params(config) ? 2 : 1);  // W
  return n;
}

Eigen::VectorXd FlodeModel::pack() const {
  std::vector<double> out;
  auto push_matrix = [&](const Eigen::MatrixXd& m) {
    out.insert(out.end(), m.data(), m.data() + m.size());
  };
  for (const auto& w : enc_w) push_matrix(w);
  for (const auto& b : enc_b) out.insert(out.end(), b.data(), b.data() + b.size());
  for (const auto& w : dec_w) push_matrix(w);
  for (const auto& b : dec_b) out.insert(out.end(), b.data(), b.data() + b.size());
  out.push_back(alpha);
  out.push_back(h.real());
  if (complex_params(config)) out.push_back(h.imag());
  for (long i = 0; i < diag_w.size(); ++i) out.push_back(diag_w(i).real());
  if (complex_params(config))
    for (long i = 0; i < diag_w.size(); ++i) out.push_back(diag_w(i).imag());
  return Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
}

void FlodeModel::unpack(const Eigen::VectorXd& flat) {
  long pos = 0;
  auto take_matrix = [&](Eigen::MatrixXd& m) {
    std::memcpy(m.data(), flat.data() + pos, sizeof(double) * m.size());
    pos += m.size();
  };
  for (auto& w : enc_w) take_matrix(w);
  for (auto& b : enc_b) {
    std::memcpy(b.data(), flat.data() + pos, sizeof(double) * b.size());
    pos += b.size();
  }
  for (auto& w : dec_w) take_matrix(w);
  for (auto& b : dec_b) {
    std::memcpy(b.data(), flat.data() + pos, sizeof(double) * b.size());
    pos += b.size();
  }
  alpha = flat(pos++);
  const double h_re = flat(pos++);
  const double h_im = complex_params(config) ? flat(pos++) : 0.0;
  h = {h_re, h_im};
  for (long i = 0; i < diag_w.size(); ++i)
    diag_w(i) = {flat(pos + i), diag_w(i).imag()};
  pos += diag_w.size();
  if (complex_params(config)) {
    for (long i = 0; i < diag_w.size(); ++i)
      diag_w(i) = {diag_w(i).real(), flat(pos + i)};
    pos += diag_w.size();
  } else {
    for (long i = 0; i < diag_w.size(); ++i)
      diag_w(i) = {diag_w(i).real(), 0.0};
  }
  if (pos != flat.size())
    fail(ErrorCode::dimension_mismatch, "parameter vector size mismatch");
}

Eigen::VectorXd FlodeModel::decay_mask() const {
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(pack().size());
  long pos = 0;
  for (const auto& w : enc_w) {
    mask.segment(pos, w.size()).setOnes();
    pos += w.size();
  }
  for (const auto& b : enc_b) pos += b.size();
  for (const auto& w : dec_w) {
    mask.segment(pos, w.size()).setOnes();
    pos += w.size();
  }
  return mask;
}

FlodeModel init_model(const ModelConfig& config,
                      std::shared_ptr<const SnaFactors> factors, int in_dim,
                      int num_classes, std::uint64_t seed) {
  config.validate();
  if (!factors) fail(ErrorCode::invalid_argument, "null factors");
  if (in_dim < 1 || num_classes < 2)
    fail(ErrorCode::invalid_argument, "invalid feature/class dimensions");

  FlodeModel m;
  m.config = config;
  m.config.seed = seed;
  m.factors = std::move(factors);
  m.in_dim = in_dim;
  m.num_classes = num_classes;

  Rng rng(seed);
  auto init_linear = [&](int rows, int cols, Eigen::MatrixXd& w,
                         Eigen::RowVectorXd& b) {
    const double bound = 1.0 / std::sqrt(double(rows));
    w.resize(rows, cols);
    for (long c = 0; c < w.cols(); ++c)
      for (long r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-bound, bound);
    b.resize(cols);
    for (long c = 0; c < b.size(); ++c) b(c) = rng.uniform(-bound, bound);
  };

  const int hidden = config.hidden_channels;
  int d = in_dim;
  m.enc_w.resize(config.encoder_layers);
  m.enc_b.resize(config.encoder_layers);
  for (int l = 0; l < config.encoder_layers; ++l) {
    init_linear(d, hidden, m.enc_w[l], m.enc_b[l]);
    d = hidden;
  }

  const int dec_in = config.scheme == Scheme::schrodinger ? 2 * hidden : hidden;
  m.dec_w.resize(config.decoder_layers);
  m.dec_b.resize(config.decoder_layers);
  d = dec_in;
  for (int l = 0; l < config.decoder_layers; ++l) {
    const int out = l + 1 == config.decoder_layers ? num_classes : hidden;
    init_linear(d, out, m.dec_w[l], m.dec_b[l]);
    d = out;
  }

  m.alpha = 1.0;
  m.h = {1.0, 0.0};
  m.diag_w.resize(hidden);
  const double wb = 1.0 / std::sqrt(double(hidden));
  for (int i = 0; i < hidden; ++i) m.diag_w(i) = {rng.uniform(-wb, wb), 0.0};
  if (config.scheme == Scheme::schrodinger)
    for (int i = 0; i < hidden; ++i)
      m.diag_w(i) = {m.diag_w(i).real(), rng.uniform(-wb, wb)};
  return m;
}

namespace {

struct DropoutMasks {
  std::optional<Eigen::ArrayXXd> input;
  std::vector<Eigen::ArrayXXd> decoder;
};

Eigen::ArrayXXd draw_mask(long rows, long cols, double rate, Rng& rng) {
  Eigen::ArrayXXd mask(rows, cols);
  const double keep = 1.0 - rate;
  for (long c = 0; c < cols; ++c)
    for (long r = 0; r < rows; ++r)
      mask(r, c) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  return mask;
}

DropoutMasks draw_masks(const FlodeModel& m, long rows, bool active, Rng& rng) {
  DropoutMasks masks;
  if (!active) return masks;
  if (m.config.input_dropout > 0.0)
    masks.input = draw_mask(rows, m.in_dim, m.config.input_dropout, rng);
  if (m.config.decoder_dropout > 0.0)
    for (int l = 0; l + 1 < m.config.decoder_layers; ++l)
      masks.decoder.push_back(
          draw_mask(rows, m.config.hidden_channels, m.config.decoder_dropout,
                    rng));
  return masks;
}

template <typename Scalar>
struct GraphVars {
  using Var = typename Tape<Scalar>::Var;
  std::vector<Var> enc_w, enc_b, dec_w, dec_b;
  Var alpha, h, w;
  Var logits;
};

template <typename Scalar>
typename Tape<Scalar>::Matrix cast_matrix(const Eigen::MatrixXd& m) {
  return m.template cast<Scalar>();
}

// Builds the forward graph: input dropout, encoder MLP, T Euler layers
// (no nonlinearity, no dropout), decode. Returns the logits variable.
template <typename Scalar>
GraphVars<Scalar> build_graph(Tape<Scalar>& tape, const FlodeModel& m,
                              const Eigen::MatrixXd& x,
                              const DropoutMasks& masks) {
  using Var = typename Tape<Scalar>::Var;
  GraphVars<Scalar> vars;

  for (const auto& w : m.enc_w)
    vars.enc_w.push_back(tape.leaf(cast_matrix<Scalar>(w)));
  for (const auto& b : m.enc_b)
    vars.enc_b.push_back(tape.leaf(cast_matrix<Scalar>(b)));
  for (const auto& w : m.dec_w)
    vars.dec_w.push_back(tape.leaf(cast_matrix<Scalar>(w)));
  for (const auto& b : m.dec_b)
    vars.dec_b.push_back(tape.leaf(cast_matrix<Scalar>(b)));

  Eigen::MatrixXd alpha_value(1, 1);
  alpha_value(0, 0) = m.alpha;
  vars.alpha = tape.leaf(cast_matrix<Scalar>(alpha_value));

  typename Tape<Scalar>::Matrix h_value(1, 1);
  if constexpr (Tape<Scalar>::kComplex)
    h_value(0, 0) = m.h;
  else
    h_value(0, 0) = m.h.real();
  vars.h = tape.leaf(std::move(h_value));

  typename Tape<Scalar>::Matrix w_value(1, m.diag_w.size());
  for (long i = 0; i < m.diag_w.size(); ++i) {
    if constexpr (Tape<Scalar>::kComplex)
      w_value(0, i) = m.diag_w(i);
    else
      w_value(0, i) = m.diag_w(i).real();
  }
  vars.w = tape.leaf(std::move(w_value));

  Var state = tape.leaf(cast_matrix<Scalar>(x));
  if (masks.input) state = tape.mask_scale(state, *masks.input);
  for (std::size_t l = 0; l < vars.enc_w.size(); ++l)
    state = tape.leaky_relu(
        tape.add_row(tape.matmul(state, vars.enc_w[l]), vars.enc_b[l]),
        m.config.leaky_slope);

  // Euler update x <- x + c S^a x W, c = -h (heat) or -/+ i h (Schrodinger).
  Scalar unit;
  if constexpr (Tape<Scalar>::kComplex)
    unit = m.config.scheme == Scheme::heat
               ? Scalar(-1.0, 0.0)
               : (m.config.sign == SchrodingerSign::plus ? Scalar(0.0, 1.0)
                                                         : Scalar(0.0, -1.0));
  else
    unit = Scalar(-1.0);
  const Var step_scale = tape.scalar_times(vars.h, unit);

  const SnaFactors& f = *m.factors;
  const double drop_tol = kSigmaDropRel * f.sigma_max();
  for (int t = 0; t < m.config.num_layers; ++t) {
    Var g = tape.frac_apply(f.u, f.sigma, f.v, drop_tol, vars.alpha, state);
    g = tape.scale_columns(g, vars.w);
    state = tape.add_scaled(state, g, step_scale);
    if (!tape.value(state).allFinite())
      fail(ErrorCode::numeric_failure,
           "non-finite features after Euler layer " + std::to_string(t + 1));
  }

  if constexpr (Tape<Scalar>::kComplex) {
    state = m.config.scheme == Scheme::schrodinger ? tape.concat_reim(state)
                                                   : tape.real_part(state);
  }

  for (std::size_t l = 0; l < vars.dec_w.size(); ++l) {
    state = tape.add_row(tape.matmul(state, vars.dec_w[l]), vars.dec_b[l]);
    if (l + 1 < vars.dec_w.size()) {
      state = tape.leaky_relu(state, m.config.leaky_slope);
      if (l < masks.decoder.size())
        state = tape.mask_scale(state, masks.decoder[l]);
    }
  }
  vars.logits = state;
  return vars;
}

template <typename Scalar>
Eigen::MatrixXd logits_to_real(const typename Tape<Scalar>::Matrix& logits) {
  if constexpr (Tape<Scalar>::kComplex)
    return logits.real();
  else
    return logits;
}

template <typename Scalar>
Eigen::MatrixXd forward_impl(const FlodeModel& m, const Eigen::MatrixXd& x,
                             const DropoutMasks& masks) {
  Tape<Scalar> tape;
  const auto vars = build_graph(tape, m, x, masks);
  Eigen::MatrixXd logits = logits_to_real<Scalar>(tape.value(vars.logits));
  if (!logits.allFinite())
    fail(ErrorCode::numeric_failure, "non-finite logits");
  return logits;
}

void check_forward_inputs(const FlodeModel& m, const Eigen::MatrixXd& x) {
  if (x.rows() != m.factors->num_nodes())
    fail(ErrorCode::dimension_mismatch,
         "feature rows do not match the graph operator");
  if (x.cols() != m.in_dim)
    fail(ErrorCode::dimension_mismatch, "feature width mismatch");
}

}  // namespace

Eigen::MatrixXd forward(const FlodeModel& model, const Eigen::MatrixXd& x,
                        bool dropout_active, Rng& rng) {
  check_forward_inputs(model, x);
  const DropoutMasks masks = draw_masks(model, x.rows(), dropout_active, rng);
  if (model.config.scheme == Scheme::schrodinger)
    return forward_impl<std::complex<double>>(model, x, masks);
  return forward_impl<double>(model, x, masks);
}

Eigen::MatrixXd forward_complex_path(const FlodeModel& model,
                                     const Eigen::MatrixXd& x) {
  check_forward_inputs(model, x);
  return forward_impl<std::complex<double>>(model, x, DropoutMasks{});
}

namespace {

template <typename Scalar>
LossGrads loss_and_grads_impl(const FlodeModel& m, const Eigen::MatrixXd& x,
                              const std::vector<int>& labels,
                              const std::vector<int>& mask,
                              const DropoutMasks& masks) {
  Tape<Scalar> tape;
  const auto vars = build_graph(tape, m, x, masks);
  LossGrads result;
  const auto loss_var =
      tape.softmax_cross_entropy(vars.logits, labels, mask, &result.loss);
  tape.backward(loss_var);

  std::vector<double> grads;
  auto push_real = [&](const typename Tape<Scalar>::Matrix& adj) {
    for (long c = 0; c < adj.cols(); ++c)
      for (long r = 0; r < adj.rows(); ++r)
        grads.push_back(detail::real_part(adj(r, c)));
  };
  // Mirrors FlodeModel::pack() ordering (Eigen matrices are column-major,
  // and so is pack()).
  for (auto v : vars.enc_w) push_real(tape.adjoint(v));
  for (auto v : vars.enc_b) push_real(tape.adjoint(v));
  for (auto v : vars.dec_w) push_real(tape.adjoint(v));
  for (auto v : vars.dec_b) push_real(tape.adjoint(v));
  push_real(tape.adjoint(vars.alpha));
  const auto& h_adj = tape.adjoint(vars.h);
  grads.push_back(detail::real_part(h_adj(0, 0)));
  if constexpr (Tape<Scalar>::kComplex) {
    if (m.config.scheme == Scheme::schrodinger)
      grads.push_back(h_adj(0, 0).imag());
  }
  const auto& w_adj = tape.adjoint(vars.w);
  for (long i = 0; i < w_adj.cols(); ++i)
    grads.push_back(detail::real_part(w_adj(0, i)));
  if constexpr (Tape<Scalar>::kComplex) {
    if (m.config.scheme == Scheme::schrodinger)
      for (long i = 0; i < w_adj.cols(); ++i)
        grads.push_back(w_adj(0, i).imag());
  }
  result.grads =
      Eigen::Map<Eigen::VectorXd>(grads.data(), static_cast<long>(grads.size()));
  return result;
}

}  // namespace

LossGrads loss_and_grads(const FlodeModel& model, const Eigen::MatrixXd& x,
                         const std::vector<int>& labels,
                         const std::vector<int>& mask, bool dropout_active,
                         Rng& rng) {
  check_forward_inputs(model, x);
  if (mask.empty()) fail(ErrorCode::invalid_argument, "empty training mask");
  for (int i : mask)
    if (i < 0 || i >= x.rows() || labels[i] < 0 ||
        labels[i] >= model.num_classes)
      fail(ErrorCode::invalid_argument, "mask/label out of range");
  const DropoutMasks masks = draw_masks(model, x.rows(), dropout_active, rng);
  if (model.config.scheme == Scheme::schrodinger)
    return loss_and_grads_impl<std::complex<double>>(model, x, labels, mask,
                                                     masks);
  return loss_and_grads_impl<double>(model, x, labels, mask, masks);
}

AdamState make_adam_state(const FlodeModel& model) {
  AdamState state;
  const long n = model.pack().size();
  state.m = Eigen::VectorXd::Zero(n);
  state.v = Eigen::VectorXd::Zero(n);
  state.step = 0;
  return state;
}

void adam_step(FlodeModel& model, const Eigen::VectorXd& grads,
               AdamState& state, double lr, double weight_decay) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  Eigen::VectorXd params = model.pack();
  if (params.size() != grads.size() || params.size() != state.m.size())
    fail(ErrorCode::dimension_mismatch, "gradient/state size mismatch");
  state.step += 1;
  state.m = beta1 * state.m + (1.0 - beta1) * grads;
  state.v = beta2 * state.v + (1.0 - beta2) * grads.cwiseProduct(grads);
  const double bc1 = 1.0 - std::pow(beta1, double(state.step));
  const double bc2 = 1.0 - std::pow(beta2, double(state.step));
  const Eigen::VectorXd m_hat = state.m / bc1;
  const Eigen::VectorXd v_hat = state.v / bc2;
  Eigen::VectorXd update =
      m_hat.array() / (v_hat.array().sqrt() + eps) * lr;
  if (weight_decay > 0.0)
    update += (lr * weight_decay) * model.decay_mask().cwiseProduct(params);
  params -= update;
  model.unpack(params);
  if (model.config.scheme == Scheme::heat && model.h.real() < 1e-4)
    model.h = {1e-4, 0.0};
}

double evaluate(const FlodeModel& model, const Eigen::MatrixXd& x,
                const std::vector<int>& labels, const std::vector<int>& mask) {
  if (mask.empty()) fail(ErrorCode::invalid_argument, "empty evaluation mask");
  Rng rng(0);
  const Eigen::MatrixXd logits = forward(model, x, false, rng);
  long correct = 0;
  for (int i : mask) {
    long arg = 0;
    logits.row(i).maxCoeff(&arg);
    if (arg == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

TrainResult train(FlodeModel model, const Eigen::MatrixXd& x,
                  const std::vector<int>& labels, const SplitIndices& splits) {
  if (splits.train.empty() || splits.val.empty())
    fail(ErrorCode::invalid_argument, "train/val splits must be nonempty");

  AdamState state = make_adam_state(model);
  Rng rng(model.config.seed ^ 0x7261696e5f726e67ULL);

  TrainResult result;
  result.best_val_acc = -1.0;
  Eigen::VectorXd best_params = model.pack();
  int since_improvement = 0;

  for (int epoch = 1; epoch <= model.config.max_epochs; ++epoch) {
    const LossGrads lg =
        loss_and_grads(model, x, labels, splits.train, true, rng);
    if (!std::isfinite(lg.loss)) {
      result.diverged = true;
      break;
    }
    adam_step(model, lg.grads, state, model.config.learning_rate,
              model.config.weight_decay);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = lg.loss;
    rec.train_acc = evaluate(model, x, labels, splits.train);
    rec.val_acc = evaluate(model, x, labels, splits.val);
    rec.test_acc =
        splits.test.empty() ? 0.0 : evaluate(model, x, labels, splits.test);
    result.history.push_back(rec);

    if (rec.val_acc > result.best_val_acc) {
      result.best_val_acc = rec.val_acc;
      result.best_epoch = epoch;
      best_params = model.pack();
      since_improvement = 0;
    } else if (++since_improvement >= model.config.patience) {
      break;
    }
  }

  model.unpack(best_params);
  result.model = std::move(model);
  return result;
}

DominanceReport dominance_audit(const FlodeModel& model,
                                const Spectrum& sna_spectrum) {
  ChannelMixer w;
  w.diag_w = model.diag_w;
  w.scheme = model.config.scheme;
  return predict_dominance(sna_spectrum, w, model.alpha,
                           GraphClass::undirected_or_normal, model.config.sign);
}

double gradient_check(const FlodeModel& model, const Eigen::MatrixXd& x,
                      const std::vector<int>& labels,
                      const std::vector<int>& mask) {
  Rng rng(0);
  FlodeModel probe = model;
  const LossGrads analytic = loss_and_grads(probe, x, labels, mask, false, rng);

  constexpr double eps = 1e-4;
  // Floored denominator: below the floor the comparison is absolute at
  // threshold * floor, which still sits well above central-difference noise.
  constexpr double denom_floor = 1e-2;
  Eigen::VectorXd params = probe.pack();
  double worst = 0.0;
  for (long i = 0; i < params.size(); ++i) {
    const double saved = params(i);
    auto loss_at = [&](double value) {
      params(i) = value;
      probe.unpack(params);
      Rng r(0);
      return loss_and_grads(probe, x, labels, mask, false, r).loss;
    };
    const double up = loss_at(saved + eps);
    const double down = loss_at(saved - eps);
    params(i) = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = analytic.grads(i);
    const double rel = std::abs(a - numeric) /
                       std::max({std::abs(a), std::abs(numeric), denom_floor});
    worst = std::max(worst, rel);
  }
  probe.unpack(params);
  return worst;
}

namespace {
constexpr char kCheckpointMagic[4] = {'F', 'L', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;
}  // namespace

void save_checkpoint(const FlodeModel& model,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  out.write(reinterpret_cast<const char*>(&kCheckpointVersion),
            sizeof(kCheckpointVersion));
  const std::string config = model.config.to_json();
  const std::uint64_t config_len = config.size();
  out.write(reinterpret_cast<const char*>(&config_len), sizeof(config_len));
  out.write(config.data(), static_cast<std::streamsize>(config.size()));
  const std::int64_t in_dim = model.in_dim;
  const std::int64_t num_classes = model.num_classes;
  out.write(reinterpret_cast<const char*>(&in_dim), sizeof(in_dim));
  out.write(reinterpret_cast<const char*>(&num_classes), sizeof(num_classes));
  const Eigen::VectorXd params = model.pack();
  const std::uint64_t count = params.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) fail(ErrorCode::io_error, "failed writing " + path.string());
}

FlodeModel load_checkpoint(const std::filesystem::path& path,
                           std::shared_ptr<const SnaFactors> factors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0 ||
      version != kCheckpointVersion)
    fail(ErrorCode::io_error, "not a model checkpoint: " + path.string());
  std::uint64_t config_len = 0;
  in.read(reinterpret_cast<char*>(&config_len), sizeof(config_len));
  std::string config_text(config_len, '\0');
  in.read(config_text.data(), static_cast<std::streamsize>(config_len));
  std::int64_t in_dim = 0, num_classes = 0;
  in.read(reinterpret_cast<char*>(&in_dim), sizeof(in_dim));
  in.read(reinterpret_cast<char*>(&num_classes), sizeof(num_classes));
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  Eigen::VectorXd params(count);
  in.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) fail(ErrorCode::io_error, "truncated checkpoint");

  const ModelConfig config = ModelConfig::from_json(config_text);
  FlodeModel model = init_model(config, std::move(factors),
                                static_cast<int>(in_dim),
                                static_cast<int>(num_classes), config.seed);
  model.unpack(params);
  return model;
}

}  // namespace flode
