#pragma once

#include <optional>
#include <span>

#include "evid/evidential_core.hpp"

namespace evid {

/// Ground-truth class as a one-hot vector over num_classes.
class OneHotLabel {
 public:
  /// Throws std::invalid_argument if index >= num_classes or num_classes < 2.
  OneHotLabel(ClassIndex index, std::size_t num_classes);

  ClassIndex index() const noexcept { return index_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  Vector as_vector() const;

 private:
  ClassIndex index_;
  std::size_t num_classes_;
};

enum class Reduction { sum, mean };

struct LossConfig {
  /// KL coefficient; unset means 1 / C.
  std::optional<double> lambda_reg;
  double lambda_a = 0.05;
  double lambda_e = 1.0;
  QuantMode mode = QuantMode::entropy;
  Reduction reduction = Reduction::mean;
  /// Weight of pseudo-labelled samples in the supervised term.
  double pseudo_label_weight = 1.0;

  double kl_coefficient(std::size_t num_classes) const;
  /// Throws std::invalid_argument on negative coefficients.
  void validate() const;
};

/// ln alpha_0 - ln alpha_{label}.
double nll_loss(const DirichletPrediction& pred, const OneHotLabel& label);

/// KL(Dir(alpha~) || Dir(1,...,1)) where alpha~ replaces the true-class
/// concentration with 1.
double kl_regularizer(const DirichletPrediction& pred, const OneHotLabel& label);

/// nll_loss + lambda_reg * kl_regularizer.
double edl_loss(const DirichletPrediction& pred, const OneHotLabel& label, const LossConfig& cfg);

/// lambda_a * U_alea + lambda_e * U_epis in cfg.mode.
double ug_loss(const DirichletPrediction& pred, const LossConfig& cfg);

struct LabeledPrediction {
  DirichletPrediction pred;
  OneHotLabel label;
  double weight = 1.0;
};

struct LossBreakdown {
  double supervised = 0.0;
  double unsupervised = 0.0;
  double total() const { return supervised + unsupervised; }
};

/// Supervised EDL term over the labelled batch plus UG term over the
/// unlabelled batch. Each term is summed in sample order and, under
/// Reduction::mean, divided by its own batch size.
LossBreakdown total_loss(std::span<const LabeledPrediction> labeled,
                         std::span<const DirichletPrediction> unlabeled, const LossConfig& cfg);

// Gradients with respect to alpha.
Vector nll_gradient(const DirichletPrediction& pred, const OneHotLabel& label);
Vector kl_gradient(const DirichletPrediction& pred, const OneHotLabel& label);
Vector edl_gradient(const DirichletPrediction& pred, const OneHotLabel& label, const LossConfig& cfg);
Vector ug_gradient(const DirichletPrediction& pred, const LossConfig& cfg);

/// d(edl_loss)/d(alpha) when a label is given, d(ug_loss)/d(alpha) otherwise.
Vector loss_gradients(const DirichletPrediction& pred, const std::optional<OneHotLabel>& label,
                      const LossConfig& cfg);

}  // namespace evid
