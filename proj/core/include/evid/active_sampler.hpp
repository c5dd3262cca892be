#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evid/enn_trainer.hpp"
#include "evid/metrics_report.hpp"
#include "evid/sample_pool.hpp"

namespace evid {

/// Selection sizes for one active round.
struct RoundPlan {
  std::size_t round = 1;            // 1-based
  std::size_t uncertain_count = 0;  // b_u
  std::size_t certain_count = 0;    // b_c
  std::size_t kappa = 10;           // candidate multiplier for the EU pre-filter
};

/// K rounds with b_u = budget / K (the remainder goes to the last rounds) and
/// b_c = round(k * certain_step_fraction * target_size) in round k.
std::vector<RoundPlan> make_round_plans(std::size_t target_size, std::size_t budget,
                                        std::size_t rounds, std::size_t kappa,
                                        double certain_step_fraction);

/// Uncertainties of one unlabelled target sample under the current model.
struct ScoredSample {
  std::size_t id;
  double epistemic;
  double aleatoric;
  ClassIndex predicted;
};

std::vector<ScoredSample> score_unlabeled(const SamplePool& pool, const EvidentialMLP& model,
                                          QuantMode mode);

/// Positions into a score list ordered by descending EU, ties by ascending
/// sample id. Built once per round and shared by both samplers.
class EpistemicOrdering {
 public:
  explicit EpistemicOrdering(std::span<const ScoredSample> scores);

  const std::vector<std::size_t>& descending() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }

  /// Number of orderings constructed on the calling thread.
  static std::size_t sorts_on_this_thread();

 private:
  std::vector<std::size_t> order_;
};

/// Two-step DUC selection: top kappa * b_u by EU, then top b_u of those by
/// AU (ties by id). Returns sample ids in selection order.
std::vector<std::size_t> select_uncertain(std::span<const ScoredSample> scores,
                                          const EpistemicOrdering& ordering, std::size_t kappa,
                                          std::size_t count);

struct CertainPick {
  std::size_t id;
  ClassIndex pseudo_label;
};

/// Lowest-EU samples with their predictions as pseudo labels. The
/// class-balanced variant takes floor(count / C) per predicted class and
/// fills the rest by global lowest EU. Returns fewer picks when the pool is
/// too small.
std::vector<CertainPick> select_certain(std::span<const ScoredSample> scores,
                                        const EpistemicOrdering& ordering, std::size_t count,
                                        bool class_balanced, std::size_t num_classes);

struct SamplingSwitches {
  bool uncertainty = true;
  bool certainty = true;
  bool class_balanced = true;
};

struct RoundSelection {
  std::vector<std::size_t> uncertain;
  std::vector<CertainPick> certain;
  std::size_t epistemic_sorts = 0;
};

/// Both selections from a single EU sort. Throws std::invalid_argument when
/// kappa * b_u exceeds the pool, or when b_c + kappa * b_u does too with
/// both samplers on.
RoundSelection select_round(std::span<const ScoredSample> scores, const RoundPlan& plan,
                            const SamplingSwitches& switches, std::size_t num_classes);

/// Scores T^u, selects b_u samples with the two-step rule and labels them by
/// oracle. Throws when the pool is too small or the budget cannot cover b_u.
std::vector<std::size_t> uncertainty_sampling(SamplePool& pool, const EvidentialMLP& model,
                                              const RoundPlan& plan, QuantMode mode);

/// Scores T^u and moves the b_c most certain samples to T^l with pseudo labels.
std::vector<CertainPick> certainty_sampling(SamplePool& pool, const EvidentialMLP& model,
                                            const RoundPlan& plan, bool class_balanced,
                                            QuantMode mode);

struct AdaConfig {
  TrainConfig train;
  LossConfig loss;
  /// 1-based epochs after which a sampling round runs, one per plan.
  std::vector<std::size_t> sampling_epochs;
  std::vector<RoundPlan> rounds;
  bool uncertainty_guidance = true;
  SamplingSwitches sampling;
  /// Epoch whose end-of-epoch model is scored for misclassification AUROC;
  /// 0 means the first sampling epoch (or the last epoch without rounds).
  std::size_t auroc_epoch = 0;
  std::size_t top_pairs = 4;

  /// Throws std::invalid_argument on schedule/plan inconsistencies.
  void validate(const SamplePool& pool) const;
};

/// Trains and samples in alternation and reports per-round metrics. The pool
/// is updated in place; the model ends in its final trained state.
AdaRunReport run_ada(SamplePool& pool, EvidentialMLP& model, const AdaConfig& cfg);

}  // namespace evid
