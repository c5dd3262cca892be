#include "evid/evidential_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "evid/special_functions.hpp"

namespace evid {

std::string_view to_string(QuantMode mode) {
  return mode == QuantMode::variance ? "variance" : "entropy";
}

QuantMode parse_quant_mode(std::string_view text) {
  if (text == "variance") return QuantMode::variance;
  if (text == "entropy") return QuantMode::entropy;
  throw std::invalid_argument("unknown quantification mode '" + std::string(text) +
                              "' (expected variance|entropy)");
}

DirichletPrediction::DirichletPrediction(Vector alpha) : alpha_(std::move(alpha)), strength_(0.0) {
  if (alpha_.size() < 2) {
    throw std::invalid_argument("DirichletPrediction needs at least 2 classes, got " +
                                std::to_string(alpha_.size()));
  }
  for (Eigen::Index c = 0; c < alpha_.size(); ++c) {
    if (!std::isfinite(alpha_[c]) || alpha_[c] <= 0.0) {
      throw std::domain_error("alpha[" + std::to_string(c) + "] must be finite and > 0, got " +
                              std::to_string(alpha_[c]));
    }
  }
  strength_ = alpha_.sum();
}

DirichletPrediction::DirichletPrediction(std::initializer_list<double> alpha)
    : DirichletPrediction(Vector(Eigen::Map<const Vector>(alpha.begin(),
                                                          static_cast<Eigen::Index>(alpha.size())))) {}

DirichletPrediction DirichletPrediction::from_external(const std::vector<double>& alpha) {
  Vector v(static_cast<Eigen::Index>(alpha.size()));
  for (std::size_t c = 0; c < alpha.size(); ++c) {
    const double a = alpha[c];
    if (!std::isfinite(a) || a <= 0.0) {
      throw std::domain_error("alpha[" + std::to_string(c) + "] must be finite and > 0, got " +
                              std::to_string(a));
    }
    v[static_cast<Eigen::Index>(c)] = std::max(a, kAlphaFloor);
  }
  return DirichletPrediction(std::move(v));
}

Vector mean_probabilities(const DirichletPrediction& pred) {
  return pred.alpha() / pred.strength();
}

ClassIndex predict_class(const DirichletPrediction& pred) {
  const Vector& a = pred.alpha();
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < a.size(); ++c) {
    if (a[c] > a[best]) best = c;
  }
  return static_cast<ClassIndex>(best);
}

CovarianceBundle covariance_bundle(const DirichletPrediction& pred) {
  const Vector mu = mean_probabilities(pred);
  const double a0 = pred.strength();
  CovarianceBundle out;
  out.total = Matrix(mu.asDiagonal()) - mu * mu.transpose();
  out.aleatoric = (a0 / (a0 + 1.0)) * out.total;
  out.epistemic = (1.0 / (a0 + 1.0)) * out.total;

  const Eigen::Index n = mu.size();
  Vector sigma(n);
  for (Eigen::Index c = 0; c < n; ++c) sigma[c] = std::sqrt(std::max(out.total(c, c), 0.0));
  out.correlation = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.correlation(i, i) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (sigma[i] < kCorrelationGuard || sigma[j] < kCorrelationGuard) continue;
      out.correlation(i, j) = std::clamp(out.total(i, j) / (sigma[i] * sigma[j]), -1.0, 1.0);
    }
  }
  return out;
}

ClassUncertainties class_uncertainties(const DirichletPrediction& pred) {
  const Vector mu = mean_probabilities(pred);
  const double a0 = pred.strength();
  ClassUncertainties out;
  out.total = mu.array() * (1.0 - mu.array());
  out.aleatoric = (a0 / (a0 + 1.0)) * out.total;
  out.epistemic = (1.0 / (a0 + 1.0)) * out.total;
  return out;
}

UncertaintyBundle sample_uncertainty_variance(const DirichletPrediction& pred) {
  ClassUncertainties cls = class_uncertainties(pred);
  UncertaintyBundle out;
  out.mode = QuantMode::variance;
  // Summing the class vectors keeps the sample/class identity exact; it
  // equals 1 - sum mu_c^2 because sum mu_c = 1.
  out.sample_total = cls.total.sum();
  out.sample_aleatoric = cls.aleatoric.sum();
  out.sample_epistemic = cls.epistemic.sum();
  out.class_total = std::move(cls.total);
  out.class_aleatoric = std::move(cls.aleatoric);
  out.class_epistemic = std::move(cls.epistemic);
  return out;
}

UncertaintyBundle sample_uncertainty_entropy(const DirichletPrediction& pred) {
  const Vector mu = mean_probabilities(pred);
  const Vector& a = pred.alpha();
  const double psi_strength = digamma(pred.strength() + 1.0);
  double entropy = 0.0;
  double expected_entropy = 0.0;
  for (Eigen::Index c = 0; c < a.size(); ++c) {
    if (mu[c] > 0.0) entropy -= mu[c] * std::log(mu[c]);
    expected_entropy += mu[c] * (psi_strength - digamma(a[c] + 1.0));
  }
  UncertaintyBundle out;
  out.mode = QuantMode::entropy;
  out.sample_total = entropy;
  out.sample_aleatoric = expected_entropy;
  out.sample_epistemic = entropy - expected_entropy;
  return out;
}

UncertaintyBundle quantify(const DirichletPrediction& pred, QuantMode mode) {
  return mode == QuantMode::variance ? sample_uncertainty_variance(pred)
                                     : sample_uncertainty_entropy(pred);
}

}  // namespace evid
