#include "evid/domain_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "evid/sample_pool.hpp"

namespace evid {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Dataset sample_domain(const DomainSpec& spec, const Matrix& means, double spread,
                      const DomainShift* shift, std::uint64_t seed, std::string name) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = spec.samples_per_domain;
  const auto d = static_cast<Eigen::Index>(spec.feature_dim);

  // Round-robin labels, then a seeded permutation so ids are not class-sorted.
  std::vector<ClassIndex> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % spec.num_classes;
  std::shuffle(labels.begin(), labels.end(), rng);

  Dataset out;
  out.domain = std::move(name);
  out.features.resize(static_cast<Eigen::Index>(n), d);
  out.labels = labels;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x = means.row(static_cast<Eigen::Index>(labels[i])).transpose();
    for (Eigen::Index k = 0; k < d; ++k) x[k] += spread * normal(rng);
    if (shift != nullptr) x = apply_shift(*shift, x);
    out.features.row(static_cast<Eigen::Index>(i)) = x.transpose();
  }
  return out;
}

}  // namespace

bool DomainShift::is_identity() const {
  const bool no_translation = translation.size() == 0 || translation.isZero(0.0);
  return no_translation && rotation_deg == 0.0 && noise_multiplier == 1.0;
}

void DomainSpec::validate() const {
  if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
  if (feature_dim < 2) throw std::invalid_argument("feature_dim must be >= 2");
  if (samples_per_domain < num_classes) {
    throw std::invalid_argument("samples_per_domain must be >= num_classes");
  }
  if (!(cluster_std > 0.0) || !std::isfinite(cluster_std)) {
    throw std::invalid_argument("cluster_std must be finite and > 0");
  }
  if (!(shift.noise_multiplier > 0.0) || !std::isfinite(shift.noise_multiplier)) {
    throw std::invalid_argument("shift.noise_multiplier must be finite and > 0");
  }
  if (!std::isfinite(shift.rotation_deg)) throw std::invalid_argument("shift.rotation_deg must be finite");
  if (shift.translation.size() != 0 &&
      shift.translation.size() != static_cast<Eigen::Index>(feature_dim)) {
    throw std::invalid_argument("shift.translation must have feature_dim entries");
  }
  if (class_means.size() != 0 &&
      (class_means.rows() != static_cast<Eigen::Index>(num_classes) ||
       class_means.cols() != static_cast<Eigen::Index>(feature_dim))) {
    throw std::invalid_argument("class_means must be num_classes x feature_dim");
  }
}

Matrix DomainSpec::resolved_means() const {
  return class_means.size() != 0 ? class_means : circle_means(num_classes, feature_dim, mean_radius);
}

Matrix circle_means(std::size_t num_classes, std::size_t feature_dim, double radius) {
  Matrix means = Matrix::Zero(static_cast<Eigen::Index>(num_classes),
                              static_cast<Eigen::Index>(feature_dim));
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) /
                         static_cast<double>(num_classes);
    means(static_cast<Eigen::Index>(c), 0) = radius * std::cos(angle);
    means(static_cast<Eigen::Index>(c), 1) = radius * std::sin(angle);
  }
  return means;
}

Vector apply_shift(const DomainShift& shift, const Vector& x) {
  Vector y = x;
  if (shift.rotation_deg != 0.0) {
    const double theta = shift.rotation_deg * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    y[0] = c * x[0] - s * x[1];
    y[1] = s * x[0] + c * x[1];
  }
  if (shift.translation.size() != 0) y += shift.translation;
  return y;
}

std::pair<Dataset, Dataset> generate_domain_pair(const DomainSpec& spec) {
  spec.validate();
  const Matrix means = spec.resolved_means();
  const std::uint64_t source_seed = splitmix64(spec.seed);
  const std::uint64_t target_seed = splitmix64(source_seed ^ 0x7a3c5e1d2b4f6a89ULL);
  Dataset source = sample_domain(spec, means, spec.cluster_std, nullptr, source_seed, "source");
  Dataset target = sample_domain(spec, means, spec.cluster_std * spec.shift.noise_multiplier,
                                 &spec.shift, target_seed, "target");
  return {std::move(source), std::move(target)};
}

SamplePool split_pools(Dataset source, Dataset target, double budget_fraction,
                       double initial_labeled_fraction) {
  if (!(budget_fraction >= 0.0 && budget_fraction <= 1.0)) {
    throw std::invalid_argument("budget_fraction must lie in [0, 1]");
  }
  if (!(initial_labeled_fraction >= 0.0 && initial_labeled_fraction <= 1.0)) {
    throw std::invalid_argument("initial_labeled_fraction must lie in [0, 1]");
  }
  const auto budget = static_cast<std::size_t>(
      std::llround(budget_fraction * static_cast<double>(target.size())));
  const auto initial = static_cast<std::size_t>(
      std::llround(initial_labeled_fraction * static_cast<double>(target.size())));
  SamplePool pool(std::move(source), std::move(target), budget + initial);
  // Initially labelled targets are charged to the budget like any oracle query.
  for (std::size_t id = 0; id < initial; ++id) pool.query_oracle(id);
  return pool;
}

}  // namespace evid
