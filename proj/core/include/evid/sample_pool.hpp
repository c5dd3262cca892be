#pragma once

#include <cstddef>
#include <vector>

#include "evid/domain_sim.hpp"

namespace evid {

enum class Provenance { oracle, pseudo };

struct LabeledTarget {
  std::size_t id;
  ClassIndex label;
  Provenance provenance;
};

/// Source data, labelled and unlabelled target subsets, and oracle budget.
///
/// Target labels are held back: a sampler obtains one only through
/// query_oracle (which spends budget) or by assigning a pseudo label.
/// evaluation_labels() exists for metrics and the simulated oracle log.
class SamplePool {
 public:
  SamplePool(Dataset source, Dataset target, std::size_t budget_total);

  const Dataset& source() const noexcept { return source_; }
  const Matrix& target_features() const noexcept { return target_.features; }
  std::size_t target_size() const noexcept { return target_.size(); }

  const std::vector<LabeledTarget>& target_labeled() const noexcept { return labeled_; }
  /// Unlabelled target ids in ascending order.
  const std::vector<std::size_t>& target_unlabeled() const noexcept { return unlabeled_; }
  bool is_unlabeled(std::size_t id) const;

  std::size_t budget_total() const noexcept { return budget_total_; }
  std::size_t budget_spent() const noexcept { return budget_spent_; }
  std::size_t budget_remaining() const noexcept { return budget_total_ - budget_spent_; }

  /// Reveals the label of an unlabelled target and moves it to the labelled
  /// set. Throws std::logic_error when the budget is exhausted or the id is
  /// not unlabelled.
  ClassIndex query_oracle(std::size_t id);

  /// Moves an unlabelled target to the labelled set with a predicted label.
  /// Costs no budget.
  void assign_pseudo_label(std::size_t id, ClassIndex label);

  /// Ground truth for the whole target domain. Metrics only.
  const std::vector<ClassIndex>& evaluation_labels() const noexcept { return target_.labels; }
  const Dataset& evaluation_target() const noexcept { return target_; }

  /// Throws std::logic_error if any pool invariant is broken.
  void check_invariants() const;

 private:
  void move_to_labeled(std::size_t id, ClassIndex label, Provenance provenance);

  Dataset source_;
  Dataset target_;
  std::vector<LabeledTarget> labeled_;
  std::vector<std::size_t> unlabeled_;
  std::size_t budget_total_;
  std::size_t budget_spent_ = 0;
};

/// Builds the initial pool: every target sample unlabelled except the first
/// round(initial_labeled_fraction * |T|) ids, which are oracle-labelled on
/// top of a budget of round(budget_fraction * |T|).
SamplePool split_pools(Dataset source, Dataset target, double budget_fraction = 0.05,
                       double initial_labeled_fraction = 0.0);

}  // namespace evid
