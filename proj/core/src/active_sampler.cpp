#include "evid/active_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace evid {
namespace {

thread_local std::size_t t_epistemic_sorts = 0;

// Positions ordered by ascending EU with ties by ascending id, skipping the
// first skip_top positions of the descending ordering. Walks the shared
// ordering backwards run by run instead of sorting again.
std::vector<std::size_t> ascending_positions(std::span<const ScoredSample> scores,
                                             const EpistemicOrdering& ordering,
                                             std::size_t skip_top) {
  const auto& desc = ordering.descending();
  std::vector<std::size_t> out;
  if (skip_top >= desc.size()) return out;
  out.reserve(desc.size() - skip_top);
  std::size_t end = desc.size();
  while (end > skip_top) {
    std::size_t begin = end - 1;
    const double eu = scores[desc[begin]].epistemic;
    while (begin > skip_top && scores[desc[begin - 1]].epistemic == eu) --begin;
    for (std::size_t k = begin; k < end; ++k) out.push_back(desc[k]);
    end = begin;
  }
  return out;
}

double fraction_correct(const std::vector<CertainPick>& picks, const std::vector<ClassIndex>& truth) {
  std::size_t correct = 0;
  for (const auto& p : picks) {
    if (truth.at(p.id) == p.pseudo_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(picks.size());
}

}  // namespace

std::vector<RoundPlan> make_round_plans(std::size_t target_size, std::size_t budget,
                                        std::size_t rounds, std::size_t kappa,
                                        double certain_step_fraction) {
  std::vector<RoundPlan> plans;
  if (rounds == 0) return plans;
  const std::size_t base = budget / rounds;
  const std::size_t extra = budget % rounds;
  for (std::size_t k = 1; k <= rounds; ++k) {
    RoundPlan p;
    p.round = k;
    p.uncertain_count = base + (k > rounds - extra ? 1 : 0);
    p.certain_count = static_cast<std::size_t>(std::llround(
        static_cast<double>(k) * certain_step_fraction * static_cast<double>(target_size)));
    p.kappa = kappa;
    plans.push_back(p);
  }
  return plans;
}

std::vector<ScoredSample> score_unlabeled(const SamplePool& pool, const EvidentialMLP& model,
                                          QuantMode mode) {
  const auto& ids = pool.target_unlabeled();
  Matrix features(static_cast<Eigen::Index>(ids.size()), pool.target_features().cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    features.row(static_cast<Eigen::Index>(i)) =
        pool.target_features().row(static_cast<Eigen::Index>(ids[i]));
  }
  const auto preds = model.predict(features);
  std::vector<ScoredSample> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const UncertaintyBundle u = quantify(preds[i], mode);
    out.push_back({ids[i], u.sample_epistemic, u.sample_aleatoric, predict_class(preds[i])});
  }
  return out;
}

EpistemicOrdering::EpistemicOrdering(std::span<const ScoredSample> scores) : order_(scores.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a].epistemic != scores[b].epistemic) return scores[a].epistemic > scores[b].epistemic;
    return scores[a].id < scores[b].id;
  });
  ++t_epistemic_sorts;
}

std::size_t EpistemicOrdering::sorts_on_this_thread() { return t_epistemic_sorts; }

std::vector<std::size_t> select_uncertain(std::span<const ScoredSample> scores,
                                          const EpistemicOrdering& ordering, std::size_t kappa,
                                          std::size_t count) {
  if (count == 0) return {};
  if (kappa == 0) throw std::invalid_argument("kappa must be >= 1");
  const std::size_t candidates = kappa * count;
  if (candidates > ordering.size()) {
    throw std::invalid_argument("uncertainty sampling needs " + std::to_string(candidates) +
                                " candidates but only " + std::to_string(ordering.size()) +
                                " samples are unlabelled");
  }
  std::vector<std::size_t> top(ordering.descending().begin(),
                               ordering.descending().begin() + static_cast<std::ptrdiff_t>(candidates));
  std::sort(top.begin(), top.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a].aleatoric != scores[b].aleatoric) return scores[a].aleatoric > scores[b].aleatoric;
    return scores[a].id < scores[b].id;
  });
  std::vector<std::size_t> ids;
  ids.reserve(count);
  for (std::size_t k = 0; k < count; ++k) ids.push_back(scores[top[k]].id);
  return ids;
}

namespace {

std::vector<CertainPick> select_certain_from(std::span<const ScoredSample> scores,
                                             const EpistemicOrdering& ordering, std::size_t count,
                                             bool class_balanced, std::size_t num_classes,
                                             std::size_t skip_top) {
  if (count == 0) return {};
  const std::vector<std::size_t> asc = ascending_positions(scores, ordering, skip_top);
  const std::size_t wanted = std::min(count, asc.size());
  std::vector<bool> chosen(asc.size(), false);
  std::size_t taken = 0;

  if (class_balanced) {
    if (num_classes == 0) throw std::invalid_argument("class-balanced sampling needs num_classes");
    const std::size_t per_class = count / num_classes;
    std::vector<std::size_t> per_class_taken(num_classes, 0);
    for (std::size_t k = 0; k < asc.size(); ++k) {
      const ClassIndex c = scores[asc[k]].predicted;
      if (c >= num_classes) throw std::invalid_argument("predicted class out of range");
      if (per_class_taken[c] < per_class) {
        ++per_class_taken[c];
        chosen[k] = true;
        ++taken;
      }
    }
  }
  for (std::size_t k = 0; k < asc.size() && taken < wanted; ++k) {
    if (!chosen[k]) {
      chosen[k] = true;
      ++taken;
    }
  }

  std::vector<CertainPick> picks;
  picks.reserve(taken);
  for (std::size_t k = 0; k < asc.size(); ++k) {
    if (chosen[k]) picks.push_back({scores[asc[k]].id, scores[asc[k]].predicted});
  }
  return picks;
}

}  // namespace

std::vector<CertainPick> select_certain(std::span<const ScoredSample> scores,
                                        const EpistemicOrdering& ordering, std::size_t count,
                                        bool class_balanced, std::size_t num_classes) {
  return select_certain_from(scores, ordering, count, class_balanced, num_classes, 0);
}

RoundSelection select_round(std::span<const ScoredSample> scores, const RoundPlan& plan,
                            const SamplingSwitches& switches, std::size_t num_classes) {
  const std::size_t n = scores.size();
  const std::size_t candidates = switches.uncertainty ? plan.kappa * plan.uncertain_count : 0;
  const std::size_t certain = switches.certainty ? plan.certain_count : 0;
  if (candidates > n) {
    throw std::invalid_argument("round " + std::to_string(plan.round) + ": kappa * b_u = " +
                                std::to_string(candidates) + " exceeds |T^u| = " +
                                std::to_string(n));
  }
  if (candidates > 0 && certain > 0 && candidates + certain > n) {
    throw std::invalid_argument("round " + std::to_string(plan.round) +
                                ": certain and uncertain candidate sets would overlap (b_c + kappa * "
                                "b_u > |T^u|)");
  }

  const std::size_t before = EpistemicOrdering::sorts_on_this_thread();
  const EpistemicOrdering ordering(scores);
  RoundSelection sel;
  if (switches.uncertainty) {
    sel.uncertain = select_uncertain(scores, ordering, plan.kappa, plan.uncertain_count);
  }
  if (switches.certainty) {
    sel.certain = select_certain_from(scores, ordering, certain, switches.class_balanced,
                                      num_classes, candidates);
  }
  sel.epistemic_sorts = EpistemicOrdering::sorts_on_this_thread() - before;
  return sel;
}

std::vector<std::size_t> uncertainty_sampling(SamplePool& pool, const EvidentialMLP& model,
                                              const RoundPlan& plan, QuantMode mode) {
  if (plan.uncertain_count > pool.budget_remaining()) {
    throw std::logic_error("round " + std::to_string(plan.round) + " needs " +
                           std::to_string(plan.uncertain_count) + " oracle labels but only " +
                           std::to_string(pool.budget_remaining()) + " remain");
  }
  if (plan.uncertain_count == 0) return {};
  const auto scores = score_unlabeled(pool, model, mode);
  const EpistemicOrdering ordering(scores);
  auto ids = select_uncertain(scores, ordering, plan.kappa, plan.uncertain_count);
  for (std::size_t id : ids) pool.query_oracle(id);
  return ids;
}

std::vector<CertainPick> certainty_sampling(SamplePool& pool, const EvidentialMLP& model,
                                            const RoundPlan& plan, bool class_balanced,
                                            QuantMode mode) {
  if (plan.certain_count == 0) return {};
  const auto scores = score_unlabeled(pool, model, mode);
  const EpistemicOrdering ordering(scores);
  auto picks = select_certain(scores, ordering, plan.certain_count, class_balanced,
                              model.num_classes());
  for (const auto& p : picks) pool.assign_pseudo_label(p.id, p.pseudo_label);
  return picks;
}

void AdaConfig::validate(const SamplePool& pool) const {
  train.validate();
  loss.validate();
  if (sampling_epochs.size() != rounds.size()) {
    throw std::invalid_argument("sampling_epochs has " + std::to_string(sampling_epochs.size()) +
                                " entries but there are " + std::to_string(rounds.size()) +
                                " round plans");
  }
  for (std::size_t k = 0; k < sampling_epochs.size(); ++k) {
    const std::size_t e = sampling_epochs[k];
    if (e == 0 || e > train.epochs) {
      throw std::invalid_argument("sampling epoch " + std::to_string(e) + " outside 1.." +
                                  std::to_string(train.epochs));
    }
    if (k > 0 && e <= sampling_epochs[k - 1]) {
      throw std::invalid_argument("sampling epochs must be strictly increasing");
    }
  }
  if (sampling.uncertainty) {
    std::size_t total = 0;
    for (const auto& r : rounds) total += r.uncertain_count;
    if (total > pool.budget_remaining()) {
      throw std::invalid_argument("round plans request " + std::to_string(total) +
                                  " oracle labels but the budget has " +
                                  std::to_string(pool.budget_remaining()));
    }
  }
  if (auroc_epoch > train.epochs) throw std::invalid_argument("auroc_epoch beyond the last epoch");
}

AdaRunReport run_ada(SamplePool& pool, EvidentialMLP& model, const AdaConfig& cfg) {
  cfg.validate(pool);
  LossConfig loss = cfg.loss;
  if (!cfg.uncertainty_guidance) {
    loss.lambda_a = 0.0;
    loss.lambda_e = 0.0;
  }
  const bool use_ug = cfg.uncertainty_guidance && (loss.lambda_a > 0.0 || loss.lambda_e > 0.0);
  const std::size_t auroc_epoch =
      cfg.auroc_epoch != 0 ? cfg.auroc_epoch
                           : (cfg.sampling_epochs.empty() ? cfg.train.epochs : cfg.sampling_epochs.front());

  const Dataset& target = pool.evaluation_target();
  const auto& truth = pool.evaluation_labels();

  AdaRunReport report;
  report.seed = cfg.train.seed;
  report.mode = loss.mode;
  report.budget_total = pool.budget_total();

  Trainer trainer(model, cfg.train, loss);
  TrainingSet data = make_training_set(pool, loss, use_ug);
  std::size_t next_round = 0;
  std::vector<CertainPick> all_pseudo;

  for (std::size_t epoch = 1; epoch <= cfg.train.epochs; ++epoch) {
    report.loss_curve.push_back(trainer.run_epoch(data));
    const double accuracy = evaluate(model, target.features, target.labels);
    report.epoch_target_accuracy.push_back(accuracy);
    if (epoch == auroc_epoch) {
      report.auroc = misclassification_auroc(model, target.features, target.labels, epoch);
    }
    if (next_round >= cfg.rounds.size() || cfg.sampling_epochs[next_round] != epoch) continue;

    const RoundPlan& plan = cfg.rounds[next_round++];
    const auto scores = score_unlabeled(pool, model, loss.mode);
    std::size_t unl_correct = 0;
    for (const auto& s : scores) unl_correct += (truth[s.id] == s.predicted) ? 1 : 0;

    const RoundSelection sel = select_round(scores, plan, cfg.sampling, model.num_classes());

    std::vector<const ScoredSample*> by_id(pool.target_size(), nullptr);
    for (const auto& s : scores) by_id[s.id] = &s;
    for (std::size_t id : sel.uncertain) {
      pool.query_oracle(id);
      const ScoredSample& s = *by_id[id];
      report.selection_log.push_back(
          {plan.round, id, SelectionType::uncertain, s.epistemic, s.aleatoric, s.predicted, truth[id]});
    }
    for (const auto& p : sel.certain) {
      pool.assign_pseudo_label(p.id, p.pseudo_label);
      const ScoredSample& s = *by_id[p.id];
      report.selection_log.push_back(
          {plan.round, p.id, SelectionType::certain, s.epistemic, s.aleatoric, s.predicted, truth[p.id]});
      all_pseudo.push_back(p);
    }

    RoundLog log;
    log.round = plan.round;
    log.epoch = epoch;
    log.uncertain_selected = sel.uncertain.size();
    log.certain_selected = sel.certain.size();
    log.target_accuracy = accuracy;
    log.unlabeled_accuracy =
        scores.empty() ? 0.0 : static_cast<double>(unl_correct) / static_cast<double>(scores.size());
    if (!sel.certain.empty()) log.pseudo_label_accuracy = fraction_correct(sel.certain, truth);
    log.epistemic_sorts = sel.epistemic_sorts;
    log.budget_spent = pool.budget_spent();
    report.rounds.push_back(log);

    data = make_training_set(pool, loss, use_ug);
  }

  report.final_accuracy = report.epoch_target_accuracy.empty()
                              ? evaluate(model, target.features, target.labels)
                              : report.epoch_target_accuracy.back();
  if (!all_pseudo.empty()) report.pseudo_label_accuracy = fraction_correct(all_pseudo, truth);
  report.budget_spent = pool.budget_spent();
  for (const auto& l : pool.target_labeled()) {
    (l.provenance == Provenance::oracle ? report.oracle_labeled : report.pseudo_labeled) += 1;
  }

  const auto source_preds = model.predict(pool.source().features);
  const auto target_preds = model.predict(target.features);
  report.source_class_uncertainty = class_level_uncertainty_summary(source_preds);
  report.target_class_uncertainty = class_level_uncertainty_summary(target_preds);
  std::vector<ClassIndex> predicted(target_preds.size());
  for (std::size_t i = 0; i < target_preds.size(); ++i) predicted[i] = predict_class(target_preds[i]);
  const Matrix corr = dataset_correlation_matrix(target_preds, predicted, model.num_classes());
  auto pairs = rank_class_pairs(corr);
  if (pairs.size() > cfg.top_pairs) pairs.resize(cfg.top_pairs);
  report.top_pairs = std::move(pairs);
  report.pair_label_source = LabelSource::predictions;
  return report;
}

}  // namespace evid
