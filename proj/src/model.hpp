#pragma once

#include <Eigen/Core>
#include <complex>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "rng.hpp"
#include "svd.hpp"

namespace flode {

struct ModelConfig {
  int hidden_channels = 16;
  int num_layers = 2;  // Euler layers T
  int encoder_layers = 1;
  int decoder_layers = 2;
  double input_dropout = 0.0;
  double decoder_dropout = 0.0;
  Scheme scheme = Scheme::heat;
  SchrodingerSign sign = SchrodingerSign::minus;
  double learning_rate = 5e-3;
  double weight_decay = 1e-3;
  int max_epochs = 1000;
  int patience = 200;
  std::uint64_t seed = 0;
  double leaky_slope = 0.01;

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
  void validate() const;
};

// Encoder MLP -> T Euler layers with learnable (alpha, h, diagonal W) ->
// decoder MLP. Parameters are stored real; the Schrodinger path promotes to
// complex arithmetic and decodes [Re, Im]. Weight matrices act on the right
// of row-feature matrices: x W + b.
struct FlodeModel {
  ModelConfig config;
  std::shared_ptr<const SnaFactors> factors;
  int in_dim = 0;
  int num_classes = 0;

  std::vector<Eigen::MatrixXd> enc_w;
  std::vector<Eigen::RowVectorXd> enc_b;
  std::vector<Eigen::MatrixXd> dec_w;
  std::vector<Eigen::RowVectorXd> dec_b;
  double alpha = 1.0;
  std::complex<double> h{1.0, 0.0};  // imaginary part pinned to 0 for heat
  Eigen::VectorXcd diag_w;           // imaginary parts pinned to 0 for heat

  long num_parameters() const;
  Eigen::VectorXd pack() const;
  void unpack(const Eigen::VectorXd& flat);
  // 1 for decayed entries (MLP weight matrices), 0 for biases and the
  // operator parameters alpha, h, W.
  Eigen::VectorXd decay_mask() const;
};

FlodeModel init_model(const ModelConfig& config,
                      std::shared_ptr<const SnaFactors> factors, int in_dim,
                      int num_classes, std::uint64_t seed);

// Deterministic when dropout_active is false; rng feeds the dropout masks
// otherwise.
Eigen::MatrixXd forward(const FlodeModel& model, const Eigen::MatrixXd& x,
                        bool dropout_active, Rng& rng);

// Runs the heat-scheme model through the complex arithmetic path; test hook
// for the real/complex compatibility contract.
Eigen::MatrixXd forward_complex_path(const FlodeModel& model,
                                     const Eigen::MatrixXd& x);

struct LossGrads {
  double loss = 0.0;
  Eigen::VectorXd grads;  // aligned with FlodeModel::pack()
};

LossGrads loss_and_grads(const FlodeModel& model, const Eigen::MatrixXd& x,
                         const std::vector<int>& labels,
                         const std::vector<int>& mask, bool dropout_active,
                         Rng& rng);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
};

AdamState make_adam_state(const FlodeModel& model);

// Decoupled weight decay on the entries flagged by decay_mask; beta1 = 0.9,
// beta2 = 0.999, eps = 1e-8. For heat the step size stays real and is floored
// at 1e-4 to keep it positive.
void adam_step(FlodeModel& model, const Eigen::VectorXd& grads,
               AdamState& state, double lr, double weight_decay);

double evaluate(const FlodeModel& model, const Eigen::MatrixXd& x,
                const std::vector<int>& labels, const std::vector<int>& mask);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
};

struct TrainResult {
  FlodeModel model;  // best-validation parameters restored
  std::vector<EpochRecord> history;
  double best_val_acc = 0.0;
  int best_epoch = 0;
  bool diverged = false;
};

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

TrainResult train(FlodeModel model, const Eigen::MatrixXd& x,
                  const std::vector<int>& labels, const SplitIndices& splits);

// Evaluates the learned (alpha, W) against the dominance prediction for the
// supplied SNA spectrum; margin is the FD statistic (negative means HFD).
DominanceReport dominance_audit(const FlodeModel& model,
                                const Spectrum& sna_spectrum);

// Max relative error of analytic gradients against central finite
// differences (eps = 1e-4) over every parameter, dropout off.
double gradient_check(const FlodeModel& model, const Eigen::MatrixXd& x,
                      const std::vector<int>& labels,
                      const std::vector<int>& mask);

void save_checkpoint(const FlodeModel& model, const std::filesystem::path& path);
FlodeModel load_checkpoint(const std::filesystem::path& path,
                           std::shared_ptr<const SnaFactors> factors);

}  // namespace flode
