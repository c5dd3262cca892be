#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace evid {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Zero-based class index.
using ClassIndex = std::size_t;

/// How sample/class uncertainties are quantified.
enum class QuantMode { variance, entropy };

std::string_view to_string(QuantMode mode);
/// Parses "variance" or "entropy"; throws std::invalid_argument otherwise.
QuantMode parse_quant_mode(std::string_view text);

/// Smallest concentration accepted from external sources (files, CLI input).
inline constexpr double kAlphaFloor = 1e-8;

/// Class standard deviations below this are treated as zero when forming
/// correlations.
inline constexpr double kCorrelationGuard = 1e-12;

/// Dirichlet concentration vector produced by an evidential network for one
/// sample. Holds at least two strictly positive entries.
class DirichletPrediction {
 public:
  /// Throws std::invalid_argument if fewer than two classes, or
  /// std::domain_error if any entry is non-finite or not strictly positive.
  explicit DirichletPrediction(Vector alpha);
  DirichletPrediction(std::initializer_list<double> alpha);

  /// Validating constructor for externally supplied vectors: entries must be
  /// finite and > 0; positive entries below kAlphaFloor are raised to it.
  static DirichletPrediction from_external(const std::vector<double>& alpha);

  const Vector& alpha() const noexcept { return alpha_; }
  double alpha(ClassIndex c) const { return alpha_[static_cast<Eigen::Index>(c)]; }
  /// alpha_0, the Dirichlet strength.
  double strength() const noexcept { return strength_; }
  std::size_t num_classes() const noexcept { return static_cast<std::size_t>(alpha_.size()); }

 private:
  Vector alpha_;
  double strength_;
};

/// Expected class probabilities alpha / alpha_0.
Vector mean_probabilities(const DirichletPrediction& pred);

/// argmax of alpha; ties go to the lowest class index.
ClassIndex predict_class(const DirichletPrediction& pred);

/// Covariance of the one-hot label under the Dirichlet-categorical model,
/// split by the law of total covariance.
struct CovarianceBundle {
  Matrix total;       // Cov[y] = Diag(mu) - mu mu^T
  Matrix aleatoric;   // E[Cov[y | mu]]
  Matrix epistemic;   // Cov[E[y | mu]]
  Matrix correlation;
};

CovarianceBundle covariance_bundle(const DirichletPrediction& pred);

/// Per-class variance uncertainties (the diagonals of CovarianceBundle).
struct ClassUncertainties {
  Vector total;
  Vector aleatoric;
  Vector epistemic;
};

ClassUncertainties class_uncertainties(const DirichletPrediction& pred);

/// Sample-level uncertainties, plus class-level ones in variance mode.
/// In entropy mode the class vectors are empty.
struct UncertaintyBundle {
  QuantMode mode = QuantMode::variance;
  double sample_total = 0.0;
  double sample_aleatoric = 0.0;
  double sample_epistemic = 0.0;
  Vector class_total;
  Vector class_aleatoric;
  Vector class_epistemic;
};

/// U = 1 - sum mu_c^2, split as alpha_0/(alpha_0+1) and 1/(alpha_0+1).
UncertaintyBundle sample_uncertainty_variance(const DirichletPrediction& pred);

/// Shannon entropy of mu, split into expected entropy (aleatoric) and mutual
/// information (epistemic).
UncertaintyBundle sample_uncertainty_entropy(const DirichletPrediction& pred);

UncertaintyBundle quantify(const DirichletPrediction& pred, QuantMode mode);

}  // namespace evid
