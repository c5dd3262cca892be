#include "evid/edl_losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "evid/special_functions.hpp"

namespace evid {
namespace {

void require_matching(const DirichletPrediction& pred, const OneHotLabel& label) {
  if (pred.num_classes() != label.num_classes()) {
    throw std::invalid_argument("label has " + std::to_string(label.num_classes()) +
                                " classes but prediction has " +
                                std::to_string(pred.num_classes()));
  }
}

// alpha with the true-class entry replaced by 1.
Vector tilde_alpha(const DirichletPrediction& pred, const OneHotLabel& label) {
  Vector t = pred.alpha();
  t[static_cast<Eigen::Index>(label.index())] = 1.0;
  return t;
}

struct UncertaintyPartials {
  Vector aleatoric;
  Vector epistemic;
};

UncertaintyPartials variance_partials(const DirichletPrediction& pred) {
  const Vector mu = mean_probabilities(pred);
  const double a0 = pred.strength();
  const double sum_sq = mu.squaredNorm();
  const double u = 1.0 - sum_sq;
  // dU/dalpha_k = -2 (mu_k - sum_c mu_c^2) / alpha_0
  const Vector du = (-2.0 / a0) * (mu.array() - sum_sq).matrix();
  const double inv1 = 1.0 / (a0 + 1.0);
  const double dscale = inv1 * inv1;  // d/dalpha_k of alpha_0/(alpha_0+1)
  UncertaintyPartials p;
  p.aleatoric = (a0 * inv1) * du + Vector::Constant(mu.size(), u * dscale);
  p.epistemic = inv1 * du - Vector::Constant(mu.size(), u * dscale);
  return p;
}

UncertaintyPartials entropy_partials(const DirichletPrediction& pred) {
  const Vector mu = mean_probabilities(pred);
  const Vector& a = pred.alpha();
  const double a0 = pred.strength();
  const Eigen::Index n = a.size();

  Vector log_mu(n), psi_shift(n);
  double mean_log_mu = 0.0;
  double mean_psi = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    log_mu[c] = std::log(mu[c]);
    psi_shift[c] = digamma(a[c] + 1.0);
    mean_log_mu += mu[c] * log_mu[c];
    mean_psi += mu[c] * psi_shift[c];
  }
  const double tri_strength = trigamma(a0 + 1.0);

  UncertaintyPartials p;
  p.aleatoric.resize(n);
  p.epistemic.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double d_total = -(log_mu[k] - mean_log_mu) / a0;
    const double d_alea =
        tri_strength - (psi_shift[k] - mean_psi) / a0 - mu[k] * trigamma(a[k] + 1.0);
    p.aleatoric[k] = d_alea;
    p.epistemic[k] = d_total - d_alea;
  }
  return p;
}

}  // namespace

OneHotLabel::OneHotLabel(ClassIndex index, std::size_t num_classes)
    : index_(index), num_classes_(num_classes) {
  if (num_classes < 2) throw std::invalid_argument("OneHotLabel needs at least 2 classes");
  if (index >= num_classes) {
    throw std::invalid_argument("label index " + std::to_string(index) + " out of range for " +
                                std::to_string(num_classes) + " classes");
  }
}

Vector OneHotLabel::as_vector() const {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(num_classes_));
  v[static_cast<Eigen::Index>(index_)] = 1.0;
  return v;
}

double LossConfig::kl_coefficient(std::size_t num_classes) const {
  return lambda_reg.value_or(1.0 / static_cast<double>(num_classes));
}

void LossConfig::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
    }
  };
  if (lambda_reg) check(*lambda_reg, "lambda_reg");
  check(lambda_a, "lambda_a");
  check(lambda_e, "lambda_e");
  check(pseudo_label_weight, "pseudo_label_weight");
}

double nll_loss(const DirichletPrediction& pred, const OneHotLabel& label) {
  require_matching(pred, label);
  return std::log(pred.strength()) - std::log(pred.alpha(label.index()));
}

double kl_regularizer(const DirichletPrediction& pred, const OneHotLabel& label) {
  require_matching(pred, label);
  const Vector t = tilde_alpha(pred, label);
  const double s = t.sum();
  const double n = static_cast<double>(t.size());
  const double psi_s = digamma(s);
  double kl = log_gamma(s) - log_gamma(n);
  for (Eigen::Index c = 0; c < t.size(); ++c) {
    kl -= log_gamma(t[c]);
    kl += (t[c] - 1.0) * (digamma(t[c]) - psi_s);
  }
  return kl;
}

double edl_loss(const DirichletPrediction& pred, const OneHotLabel& label, const LossConfig& cfg) {
  const double kl_coeff = cfg.kl_coefficient(pred.num_classes());
  const double nll = nll_loss(pred, label);
  return kl_coeff == 0.0 ? nll : nll + kl_coeff * kl_regularizer(pred, label);
}

double ug_loss(const DirichletPrediction& pred, const LossConfig& cfg) {
  if (cfg.lambda_a == 0.0 && cfg.lambda_e == 0.0) return 0.0;
  const UncertaintyBundle u = quantify(pred, cfg.mode);
  return cfg.lambda_a * u.sample_aleatoric + cfg.lambda_e * u.sample_epistemic;
}

LossBreakdown total_loss(std::span<const LabeledPrediction> labeled,
                         std::span<const DirichletPrediction> unlabeled, const LossConfig& cfg) {
  LossBreakdown out;
  for (const auto& s : labeled) out.supervised += s.weight * edl_loss(s.pred, s.label, cfg);
  for (const auto& p : unlabeled) out.unsupervised += ug_loss(p, cfg);
  if (cfg.reduction == Reduction::mean) {
    if (!labeled.empty()) out.supervised /= static_cast<double>(labeled.size());
    if (!unlabeled.empty()) out.unsupervised /= static_cast<double>(unlabeled.size());
  }
  return out;
}

Vector nll_gradient(const DirichletPrediction& pred, const OneHotLabel& label) {
  require_matching(pred, label);
  Vector g = Vector::Constant(pred.alpha().size(), 1.0 / pred.strength());
  const auto k = static_cast<Eigen::Index>(label.index());
  g[k] -= 1.0 / pred.alpha()[k];
  return g;
}

Vector kl_gradient(const DirichletPrediction& pred, const OneHotLabel& label) {
  require_matching(pred, label);
  const Vector t = tilde_alpha(pred, label);
  const double s = t.sum();
  const double n = static_cast<double>(t.size());
  const double common = (s - n) * trigamma(s);
  Vector g(t.size());
  for (Eigen::Index c = 0; c < t.size(); ++c) {
    g[c] = (t[c] - 1.0) * trigamma(t[c]) - common;
  }
  g[static_cast<Eigen::Index>(label.index())] = 0.0;
  return g;
}

Vector edl_gradient(const DirichletPrediction& pred, const OneHotLabel& label,
                    const LossConfig& cfg) {
  const double kl_coeff = cfg.kl_coefficient(pred.num_classes());
  Vector g = nll_gradient(pred, label);
  if (kl_coeff != 0.0) g += kl_coeff * kl_gradient(pred, label);
  return g;
}

Vector ug_gradient(const DirichletPrediction& pred, const LossConfig& cfg) {
  if (cfg.lambda_a == 0.0 && cfg.lambda_e == 0.0) return Vector::Zero(pred.alpha().size());
  const UncertaintyPartials p =
      cfg.mode == QuantMode::variance ? variance_partials(pred) : entropy_partials(pred);
  return cfg.lambda_a * p.aleatoric + cfg.lambda_e * p.epistemic;
}

Vector loss_gradients(const DirichletPrediction& pred, const std::optional<OneHotLabel>& label,
                      const LossConfig& cfg) {
  return label ? edl_gradient(pred, *label, cfg) : ug_gradient(pred, cfg);
}

}  // namespace evid
