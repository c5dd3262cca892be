#include "evid/enn_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "evid/sample_pool.hpp"

namespace evid {
namespace {

std::vector<DenseLayer> zero_layers(const std::vector<std::size_t>& sizes) {
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(sizes[l]);
    const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
    layers.push_back({Matrix::Zero(out, in), Vector::Zero(out)});
  }
  return layers;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace

EvidentialMLP::EvidentialMLP(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("MLP needs at least input and output sizes");
  if (sizes_.back() < 2) throw std::invalid_argument("MLP needs at least 2 output classes");
  for (std::size_t s : sizes_) {
    if (s == 0) throw std::invalid_argument("MLP layer sizes must be positive");
  }
  layers_ = zero_layers(sizes_);
}

EvidentialMLP EvidentialMLP::glorot(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  EvidentialMLP model(std::move(layer_sizes));
  std::mt19937_64 rng(seed);
  for (auto& layer : model.layers_) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = dist(rng);
    }
  }
  return model;
}

DirichletPrediction EvidentialMLP::forward(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim()) {
    throw std::invalid_argument("input has " + std::to_string(x.size()) +
                                " features, model expects " + std::to_string(input_dim()));
  }
  Vector h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Vector z = layers_[l].weights * h + layers_[l].bias;
    if (l + 1 < layers_.size()) {
      h = z.cwiseMax(0.0);
    } else {
      h = z.cwiseMax(-kLogitClamp).cwiseMin(kLogitClamp).array().exp();
    }
  }
  return DirichletPrediction(std::move(h));
}

std::vector<DirichletPrediction> EvidentialMLP::predict(const Matrix& inputs) const {
  const ForwardCache cache = forward_batch(*this, inputs);
  std::vector<DirichletPrediction> out;
  out.reserve(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index i = 0; i < cache.alpha.rows(); ++i) {
    out.emplace_back(Vector(cache.alpha.row(i).transpose()));
  }
  return out;
}

std::size_t EvidentialMLP::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

Vector EvidentialMLP::flat_parameters() const {
  Vector out(static_cast<Eigen::Index>(num_parameters()));
  Eigen::Index k = 0;
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) out[k++] = l.weights(r, c);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out[k++] = l.bias[r];
  }
  return out;
}

void EvidentialMLP::set_flat_parameters(const Vector& params) {
  if (static_cast<std::size_t>(params.size()) != num_parameters()) {
    throw std::invalid_argument("parameter vector has " + std::to_string(params.size()) +
                                " entries, model has " + std::to_string(num_parameters()));
  }
  Eigen::Index k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = params[k++];
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = params[k++];
  }
}

ForwardCache forward_batch(const EvidentialMLP& model, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != model.input_dim()) {
    throw std::invalid_argument("batch has " + std::to_string(inputs.cols()) +
                                " features, model expects " + std::to_string(model.input_dim()));
  }
  ForwardCache cache;
  cache.activations.push_back(inputs);
  const auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z = cache.activations.back() * layers[l].weights.transpose();
    z.rowwise() += layers[l].bias.transpose();
    cache.pre_activations.push_back(z);
    if (l + 1 < layers.size()) {
      cache.activations.push_back(z.cwiseMax(0.0));
    } else {
      cache.alpha = z.cwiseMax(-kLogitClamp).cwiseMin(kLogitClamp).array().exp();
    }
  }
  return cache;
}

ModelGradients backpropagate(const EvidentialMLP& model, const ForwardCache& cache,
                             const Matrix& dloss_dalpha) {
  const auto& layers = model.layers();
  ModelGradients grads(layers.size());
  const Matrix& logits = cache.pre_activations.back();
  Matrix delta = cache.alpha.cwiseProduct(dloss_dalpha);
  for (Eigen::Index i = 0; i < delta.rows(); ++i) {
    for (Eigen::Index c = 0; c < delta.cols(); ++c) {
      if (std::abs(logits(i, c)) > kLogitClamp) delta(i, c) = 0.0;
    }
  }
  for (std::size_t l = layers.size(); l-- > 0;) {
    grads[l].weights = delta.transpose() * cache.activations[l];
    grads[l].bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix upstream = delta * layers[l].weights;
    const Matrix& z = cache.pre_activations[l - 1];
    delta = upstream.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
  }
  return grads;
}

SgdMomentum::SgdMomentum(const EvidentialMLP& model, double momentum, double weight_decay)
    : momentum_(momentum), weight_decay_(weight_decay), velocity_(zero_layers(model.architecture())) {}

void SgdMomentum::step(EvidentialMLP& model, const ModelGradients& grads, double learning_rate) {
  auto& layers = model.layers();
  if (grads.size() != layers.size()) throw std::invalid_argument("gradient/model layer mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (!grads[l].weights.allFinite() || !grads[l].bias.allFinite()) {
      throw std::runtime_error("non-finite gradient in layer " + std::to_string(l));
    }
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix gw = grads[l].weights + weight_decay_ * layers[l].weights;
    Vector gb = grads[l].bias + weight_decay_ * layers[l].bias;
    if (started_) {
      velocity_[l].weights = momentum_ * velocity_[l].weights + gw;
      velocity_[l].bias = momentum_ * velocity_[l].bias + gb;
    } else {
      velocity_[l].weights = gw;
      velocity_[l].bias = gb;
    }
    layers[l].weights -= learning_rate * velocity_[l].weights;
    layers[l].bias -= learning_rate * velocity_[l].bias;
  }
  started_ = true;
}

ModelGradients batch_gradients(const EvidentialMLP& model, const MiniBatch& batch,
                               const LossConfig& cfg, LossBreakdown* loss) {
  const Eigen::Index n_sup = batch.supervised_inputs.rows();
  const Eigen::Index n_unl = batch.unlabeled_inputs.rows();
  if (static_cast<std::size_t>(n_sup) != batch.labels.size()) {
    throw std::invalid_argument("supervised rows and labels differ in count");
  }
  if (!batch.weights.empty() && batch.weights.size() != batch.labels.size()) {
    throw std::invalid_argument("supervised weights and labels differ in count");
  }
  const auto dim = static_cast<Eigen::Index>(model.input_dim());
  Matrix inputs(n_sup + n_unl, dim);
  if (n_sup > 0) inputs.topRows(n_sup) = batch.supervised_inputs;
  if (n_unl > 0) inputs.bottomRows(n_unl) = batch.unlabeled_inputs;

  const ForwardCache cache = forward_batch(model, inputs);
  const std::size_t classes = model.num_classes();
  const bool mean = cfg.reduction == Reduction::mean;
  const double sup_scale = (mean && n_sup > 0) ? 1.0 / static_cast<double>(n_sup) : 1.0;
  const double unl_scale = (mean && n_unl > 0) ? 1.0 / static_cast<double>(n_unl) : 1.0;

  Matrix dalpha(inputs.rows(), static_cast<Eigen::Index>(classes));
  LossBreakdown total;
  for (Eigen::Index i = 0; i < n_sup; ++i) {
    const DirichletPrediction pred(Vector(cache.alpha.row(i).transpose()));
    const OneHotLabel label(batch.labels[static_cast<std::size_t>(i)], classes);
    const double w = batch.weights.empty() ? 1.0 : batch.weights[static_cast<std::size_t>(i)];
    total.supervised += w * edl_loss(pred, label, cfg);
    dalpha.row(i) = (w * sup_scale) * edl_gradient(pred, label, cfg).transpose();
  }
  for (Eigen::Index i = 0; i < n_unl; ++i) {
    const DirichletPrediction pred(Vector(cache.alpha.row(n_sup + i).transpose()));
    total.unsupervised += ug_loss(pred, cfg);
    dalpha.row(n_sup + i) = unl_scale * ug_gradient(pred, cfg).transpose();
  }
  total.supervised *= sup_scale;
  total.unsupervised *= unl_scale;
  if (loss != nullptr) *loss = total;
  return backpropagate(model, cache, dalpha);
}

LossBreakdown backward_and_step(EvidentialMLP& model, SgdMomentum& optimizer,
                                const MiniBatch& batch, const LossConfig& cfg,
                                double learning_rate) {
  LossBreakdown loss;
  const ModelGradients grads = batch_gradients(model, batch, cfg, &loss);
  optimizer.step(model, grads, learning_rate);
  return loss;
}

double LrSchedule::rate(double base_rate, double progress) const {
  if (kind == Kind::constant) return base_rate;
  return base_rate * std::pow(1.0 + gamma * std::clamp(progress, 0.0, 1.0), -beta);
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("batch_size must be > 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be finite and > 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw std::invalid_argument("weight_decay must be finite and >= 0");
  }
  if (lr_schedule.gamma < 0.0 || lr_schedule.beta < 0.0) {
    throw std::invalid_argument("lr_schedule gamma/beta must be >= 0");
  }
  for (std::size_t h : hidden_layers) {
    if (h == 0) throw std::invalid_argument("hidden layer widths must be > 0");
  }
}

TrainingSet make_training_set(const SamplePool& pool, const LossConfig& cfg,
                              bool include_unlabeled) {
  const Dataset& src = pool.source();
  const auto& labeled = pool.target_labeled();
  const Eigen::Index dim = src.features.cols();
  TrainingSet set;
  set.supervised_features.resize(static_cast<Eigen::Index>(src.size() + labeled.size()), dim);
  set.supervised_features.topRows(static_cast<Eigen::Index>(src.size())) = src.features;
  set.supervised_labels = src.labels;
  set.supervised_weights.assign(src.size(), 1.0);
  Eigen::Index row = static_cast<Eigen::Index>(src.size());
  for (const auto& t : labeled) {
    set.supervised_features.row(row++) = pool.target_features().row(static_cast<Eigen::Index>(t.id));
    set.supervised_labels.push_back(t.label);
    set.supervised_weights.push_back(t.provenance == Provenance::pseudo ? cfg.pseudo_label_weight
                                                                        : 1.0);
  }
  if (include_unlabeled) {
    set.unlabeled_features = gather_rows(pool.target_features(), pool.target_unlabeled());
  } else {
    set.unlabeled_features.resize(0, dim);
  }
  return set;
}

Trainer::Trainer(EvidentialMLP& model, TrainConfig cfg, LossConfig loss_cfg)
    : model_(model),
      cfg_(std::move(cfg)),
      loss_cfg_(std::move(loss_cfg)),
      optimizer_(model, cfg_.momentum, cfg_.weight_decay),
      supervised_rng_(cfg_.seed ^ 0x5eed0001ULL),
      unlabeled_rng_(cfg_.seed ^ 0x5eed0002ULL) {
  cfg_.validate();
  loss_cfg_.validate();
}

EpochLoss Trainer::run_epoch(const TrainingSet& data) {
  const std::size_t n_sup = data.supervised_labels.size();
  if (n_sup == 0) throw std::invalid_argument("training requires at least one supervised sample");
  const std::size_t n_unl = static_cast<std::size_t>(data.unlabeled_features.rows());
  const bool use_ug = n_unl > 0 && (loss_cfg_.lambda_a > 0.0 || loss_cfg_.lambda_e > 0.0);

  std::vector<std::size_t> order(n_sup);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), supervised_rng_);
  std::vector<std::size_t> unl_order;
  if (use_ug) {
    unl_order.resize(n_unl);
    std::iota(unl_order.begin(), unl_order.end(), std::size_t{0});
    std::shuffle(unl_order.begin(), unl_order.end(), unlabeled_rng_);
  }

  const std::size_t bs = cfg_.batch_size;
  const std::size_t steps = (n_sup + bs - 1) / bs;
  const double total_epochs = static_cast<double>(std::max<std::size_t>(cfg_.epochs, 1));
  EpochLoss result{epochs_done_ + 1, 0.0, 0.0};
  std::size_t unl_cursor = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t begin = s * bs;
    const std::size_t end = std::min(begin + bs, n_sup);
    std::span<const std::size_t> rows(order.data() + begin, end - begin);

    MiniBatch batch;
    batch.supervised_inputs = gather_rows(data.supervised_features, rows);
    batch.labels.reserve(rows.size());
    batch.weights.reserve(rows.size());
    for (std::size_t r : rows) {
      batch.labels.push_back(data.supervised_labels[r]);
      batch.weights.push_back(data.supervised_weights.empty() ? 1.0 : data.supervised_weights[r]);
    }
    if (use_ug) {
      std::vector<std::size_t> unl_rows(std::min(bs, n_unl));
      for (auto& r : unl_rows) {
        r = unl_order[unl_cursor];
        unl_cursor = (unl_cursor + 1) % n_unl;
      }
      batch.unlabeled_inputs = gather_rows(data.unlabeled_features, unl_rows);
    } else {
      batch.unlabeled_inputs.resize(0, data.supervised_features.cols());
    }

    const double progress =
        (static_cast<double>(epochs_done_) + static_cast<double>(s) / static_cast<double>(steps)) /
        total_epochs;
    const double lr = cfg_.lr_schedule.rate(cfg_.learning_rate, progress);
    const LossBreakdown loss = backward_and_step(model_, optimizer_, batch, loss_cfg_, lr);
    result.supervised += loss.supervised;
    result.unsupervised += loss.unsupervised;
  }
  result.supervised /= static_cast<double>(steps);
  result.unsupervised /= static_cast<double>(steps);
  ++epochs_done_;
  return result;
}

std::vector<EpochLoss> train(EvidentialMLP& model, const SamplePool& pool, const TrainConfig& cfg,
                             const LossConfig& loss_cfg) {
  const bool use_ug = loss_cfg.lambda_a > 0.0 || loss_cfg.lambda_e > 0.0;
  const TrainingSet data = make_training_set(pool, loss_cfg, use_ug);
  if (data.supervised_labels.empty()) {
    throw std::invalid_argument("training requires at least one supervised sample");
  }
  Trainer trainer(model, cfg, loss_cfg);
  std::vector<EpochLoss> curve;
  for (std::size_t e = 0; e < cfg.epochs; ++e) curve.push_back(trainer.run_epoch(data));
  return curve;
}

double evaluate(const EvidentialMLP& model, const Matrix& features,
                const std::vector<ClassIndex>& labels) {
  if (labels.empty()) throw std::invalid_argument("cannot evaluate on an empty dataset");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw std::invalid_argument("features and labels differ in count");
  }
  const std::vector<DirichletPrediction> preds = model.predict(features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (predict_class(preds[i]) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace evid
