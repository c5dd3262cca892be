#include "evid/sample_pool.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace evid {

SamplePool::SamplePool(Dataset source, Dataset target, std::size_t budget_total)
    : source_(std::move(source)), target_(std::move(target)), budget_total_(budget_total) {
  if (source_.size() == 0) throw std::invalid_argument("source dataset is empty");
  if (target_.features.rows() != static_cast<Eigen::Index>(target_.size())) {
    throw std::invalid_argument("target features/labels size mismatch");
  }
  if (budget_total_ > target_.size()) {
    throw std::invalid_argument("budget exceeds the target set size");
  }
  unlabeled_.resize(target_.size());
  for (std::size_t i = 0; i < unlabeled_.size(); ++i) unlabeled_[i] = i;
}

bool SamplePool::is_unlabeled(std::size_t id) const {
  return std::binary_search(unlabeled_.begin(), unlabeled_.end(), id);
}

void SamplePool::move_to_labeled(std::size_t id, ClassIndex label, Provenance provenance) {
  auto it = std::lower_bound(unlabeled_.begin(), unlabeled_.end(), id);
  if (it == unlabeled_.end() || *it != id) {
    throw std::logic_error("target sample " + std::to_string(id) + " is not unlabelled");
  }
  unlabeled_.erase(it);
  labeled_.push_back({id, label, provenance});
}

ClassIndex SamplePool::query_oracle(std::size_t id) {
  if (budget_spent_ >= budget_total_) {
    throw std::logic_error("oracle budget exhausted (" + std::to_string(budget_total_) + ")");
  }
  const ClassIndex label = target_.labels.at(id);
  move_to_labeled(id, label, Provenance::oracle);
  ++budget_spent_;
  return label;
}

void SamplePool::assign_pseudo_label(std::size_t id, ClassIndex label) {
  move_to_labeled(id, label, Provenance::pseudo);
}

void SamplePool::check_invariants() const {
  if (labeled_.size() + unlabeled_.size() != target_.size()) {
    throw std::logic_error("labelled + unlabelled target count differs from |T|");
  }
  std::vector<bool> seen(target_.size(), false);
  std::size_t oracle = 0;
  for (const auto& l : labeled_) {
    if (l.id >= target_.size() || seen[l.id]) throw std::logic_error("bad labelled target id");
    seen[l.id] = true;
    if (l.provenance == Provenance::oracle) ++oracle;
  }
  for (std::size_t id : unlabeled_) {
    if (id >= target_.size() || seen[id]) throw std::logic_error("target id in both subsets");
    seen[id] = true;
  }
  if (oracle != budget_spent_) throw std::logic_error("budget_spent != oracle-labelled count");
  if (budget_spent_ > budget_total_) throw std::logic_error("budget overspent");
}

}  // namespace evid
