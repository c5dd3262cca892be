#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evid/evidential_core.hpp"

namespace evid {

/// Features are stored one sample per row; sample ids are row indices.
struct Dataset {
  std::string domain;
  Matrix features;
  std::vector<ClassIndex> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
};

/// Affine transform applied to target-domain features after sampling.
struct DomainShift {
  Vector translation;           // empty means no translation
  double rotation_deg = 0.0;    // rotation in the plane of the first two features
  double noise_multiplier = 1.0;  // scales the target cluster spread

  bool is_identity() const;
};

struct DomainSpec {
  std::size_t num_classes = 5;
  std::size_t feature_dim = 2;
  std::size_t samples_per_domain = 2000;
  /// C x d. Left empty, classes sit evenly on a circle of mean_radius in the
  /// first two feature dimensions.
  Matrix class_means;
  double mean_radius = 3.0;
  double cluster_std = 1.0;
  DomainShift shift;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument listing the first violated constraint.
  void validate() const;
  Matrix resolved_means() const;
};

/// C points evenly spaced on a circle of the given radius (first two dims).
Matrix circle_means(std::size_t num_classes, std::size_t feature_dim, double radius);

/// Applies the shift's rotation and translation to one feature row.
Vector apply_shift(const DomainShift& shift, const Vector& x);

/// Gaussian class clusters for the source and the shifted target. Class
/// counts are balanced to within one sample; output is deterministic in
/// spec.seed.
std::pair<Dataset, Dataset> generate_domain_pair(const DomainSpec& spec);

}  // namespace evid
