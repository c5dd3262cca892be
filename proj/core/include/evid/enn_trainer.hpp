#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "evid/edl_losses.hpp"
#include "evid/evidential_core.hpp"

namespace evid {

class SamplePool;

/// Logits are clamped to [-kLogitClamp, kLogitClamp] before exponentiation.
inline constexpr double kLogitClamp = 30.0;

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
};

/// Fully connected evidential classifier: ReLU hidden layers and an
/// exponential output activation producing Dirichlet concentrations.
class EvidentialMLP {
 public:
  /// layer_sizes = {input, hidden..., classes}; all parameters start at zero.
  explicit EvidentialMLP(std::vector<std::size_t> layer_sizes);

  /// Uniform +-sqrt(6 / (fan_in + fan_out)) weights and zero biases.
  static EvidentialMLP glorot(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

  const std::vector<std::size_t>& architecture() const noexcept { return sizes_; }
  std::size_t input_dim() const noexcept { return sizes_.front(); }
  std::size_t num_classes() const noexcept { return sizes_.back(); }

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }

  /// Throws std::invalid_argument on a dimension mismatch.
  DirichletPrediction forward(const Vector& x) const;
  /// One prediction per row of inputs.
  std::vector<DirichletPrediction> predict(const Matrix& inputs) const;

  std::size_t num_parameters() const;
  /// Layer by layer: row-major weights then bias.
  Vector flat_parameters() const;
  void set_flat_parameters(const Vector& params);

 private:
  std::vector<std::size_t> sizes_;
  std::vector<DenseLayer> layers_;
};

/// Intermediate values from a batched forward pass (samples as rows).
struct ForwardCache {
  std::vector<Matrix> pre_activations;  // one per layer
  std::vector<Matrix> activations;      // inputs first, then each hidden output
  Matrix alpha;                         // n x C
};

ForwardCache forward_batch(const EvidentialMLP& model, const Matrix& inputs);

using ModelGradients = std::vector<DenseLayer>;

/// Backpropagates dL/dalpha (n x C) through the exponential output and the
/// hidden layers. Clamped logits receive zero gradient.
ModelGradients backpropagate(const EvidentialMLP& model, const ForwardCache& cache,
                             const Matrix& dloss_dalpha);

/// SGD with momentum and L2 weight decay:
///   v <- momentum * v + (g + weight_decay * w);  w <- w - lr * v
class SgdMomentum {
 public:
  SgdMomentum(const EvidentialMLP& model, double momentum, double weight_decay);
  /// Throws std::runtime_error on a non-finite gradient entry.
  void step(EvidentialMLP& model, const ModelGradients& grads, double learning_rate);

 private:
  double momentum_;
  double weight_decay_;
  std::vector<DenseLayer> velocity_;
  bool started_ = false;
};

/// Supervised rows (with labels and weights) and unlabelled rows for one
/// optimisation step.
struct MiniBatch {
  Matrix supervised_inputs;
  std::vector<ClassIndex> labels;
  std::vector<double> weights;  // empty means all 1
  Matrix unlabeled_inputs;      // zero rows when UG is off
};

/// Loss and parameter gradients of one minibatch under cfg's reduction.
ModelGradients batch_gradients(const EvidentialMLP& model, const MiniBatch& batch,
                               const LossConfig& cfg, LossBreakdown* loss = nullptr);

/// Computes the batch loss and its gradients, then applies one optimiser
/// step. Returns the pre-update loss.
LossBreakdown backward_and_step(EvidentialMLP& model, SgdMomentum& optimizer,
                                const MiniBatch& batch, const LossConfig& cfg,
                                double learning_rate);

struct LrSchedule {
  enum class Kind { constant, inverse_decay };
  Kind kind = Kind::inverse_decay;
  double gamma = 10.0;
  double beta = 0.75;

  /// lr0 * (1 + gamma * progress)^(-beta) for inverse decay, progress in [0, 1].
  double rate(double base_rate, double progress) const;
};

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.001;
  LrSchedule lr_schedule;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden_layers{64, 64};

  void validate() const;
};

/// Rows used for one epoch: supervised samples from S and T^l, unlabelled
/// rows from T^u.
struct TrainingSet {
  Matrix supervised_features;
  std::vector<ClassIndex> supervised_labels;
  std::vector<double> supervised_weights;
  Matrix unlabeled_features;
};

/// Source plus labelled targets (pseudo labels weighted by
/// cfg.pseudo_label_weight); unlabelled targets only when include_unlabeled.
TrainingSet make_training_set(const SamplePool& pool, const LossConfig& cfg,
                              bool include_unlabeled);

struct EpochLoss {
  std::size_t epoch;  // 1-based
  double supervised;
  double unsupervised;
};

/// Stateful minibatch SGD over a fixed number of epochs. Supervised rows are
/// reshuffled every epoch; each step pairs a supervised minibatch with an
/// unlabelled one when the UG term is active.
class Trainer {
 public:
  Trainer(EvidentialMLP& model, TrainConfig cfg, LossConfig loss_cfg);

  EpochLoss run_epoch(const TrainingSet& data);
  std::size_t epochs_completed() const noexcept { return epochs_done_; }
  const LossConfig& loss_config() const noexcept { return loss_cfg_; }

 private:
  EvidentialMLP& model_;
  TrainConfig cfg_;
  LossConfig loss_cfg_;
  SgdMomentum optimizer_;
  std::mt19937_64 supervised_rng_;
  std::mt19937_64 unlabeled_rng_;
  std::size_t epochs_done_ = 0;
};

/// Runs cfg.epochs epochs on the pool's current split. Throws
/// std::invalid_argument when there is no supervised data.
std::vector<EpochLoss> train(EvidentialMLP& model, const SamplePool& pool, const TrainConfig& cfg,
                             const LossConfig& loss_cfg);

/// Fraction of rows whose predicted class equals the label.
double evaluate(const EvidentialMLP& model, const Matrix& features,
                const std::vector<ClassIndex>& labels);

}  // namespace evid
