#include <doctest.h>

#include <algorithm>
#include <set>

#include "evid/active_sampler.hpp"
#include "evid/domain_sim.hpp"

using evid::EpistemicOrdering;
using evid::RoundPlan;
using evid::ScoredSample;

namespace {

// Zero-based ids: s1 is id 0.
std::vector<ScoredSample> hand_scores() {
  const double eu[] = {5, 4, 3, 2, 1, 0};
  const double au[] = {0, 1, 9, 8, 0, 0};
  std::vector<ScoredSample> s;
  for (std::size_t i = 0; i < 6; ++i) s.push_back({i, eu[i], au[i], 0});
  return s;
}

std::vector<std::size_t> ids(const std::vector<evid::CertainPick>& picks) {
  std::vector<std::size_t> out;
  for (const auto& p : picks) out.push_back(p.id);
  return out;
}

evid::SamplePool small_pool(std::size_t n, double rotation, std::uint64_t seed) {
  evid::DomainSpec spec;
  spec.samples_per_domain = n;
  spec.shift.rotation_deg = rotation;
  spec.seed = seed;
  auto [s, t] = evid::generate_domain_pair(spec);
  return evid::split_pools(std::move(s), std::move(t), 0.05);
}

evid::AdaConfig small_ada(std::size_t target_size, std::size_t budget) {
  evid::AdaConfig cfg;
  cfg.train.epochs = 6;
  cfg.train.hidden_layers = {16, 16};
  cfg.train.seed = 2;
  cfg.loss.mode = evid::QuantMode::variance;
  cfg.loss.lambda_e = 50.0;
  cfg.sampling_epochs = {2, 4};
  cfg.rounds = evid::make_round_plans(target_size, budget, 2, 3, 0.01);
  return cfg;
}

}  // namespace

TEST_CASE("two-step uncertainty selection, hand trace") {
  const auto scores = hand_scores();
  const EpistemicOrdering order(scores);
  CHECK(order.descending() == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  CHECK(evid::select_uncertain(scores, order, 2, 2) == std::vector<std::size_t>{2, 3});
  // kappa * b_u = |T^u|: pure AU ranking.
  CHECK(evid::select_uncertain(scores, order, 3, 2) == std::vector<std::size_t>{2, 3});
  CHECK(evid::select_uncertain(scores, order, 6, 1) == std::vector<std::size_t>{2});
  CHECK(evid::select_uncertain(scores, order, 2, 0).empty());
}

TEST_CASE("ties break by sample id") {
  std::vector<ScoredSample> s{{7, 1.0, 2.0, 0}, {3, 1.0, 2.0, 0}, {5, 1.0, 2.0, 0}, {1, 0.5, 2.0, 0}};
  const EpistemicOrdering order(s);
  CHECK(order.descending() == std::vector<std::size_t>{1, 2, 0, 3});
  CHECK(evid::select_uncertain(s, order, 1, 2) == std::vector<std::size_t>{3, 5});
  CHECK(ids(evid::select_certain(s, order, 2, false, 2)) == std::vector<std::size_t>{1, 3});
}

TEST_CASE("certainty selection, hand traces") {
  auto scores = hand_scores();
  const EpistemicOrdering order(scores);
  const auto one = evid::select_certain(scores, order, 1, false, 2);
  REQUIRE(one.size() == 1);
  CHECK(one[0].id == 5);
  CHECK(evid::select_certain(scores, order, 0, false, 2).empty());

  // Balanced, C = 2: s1, s2 predicted class 0; s3, s4 class 1; EU = (1, 2, 3, 4).
  std::vector<ScoredSample> b{{0, 1, 0, 0}, {1, 2, 0, 0}, {2, 3, 0, 1}, {3, 4, 0, 1}};
  const EpistemicOrdering bo(b);
  const auto picks = evid::select_certain(b, bo, 2, true, 2);
  auto got = ids(picks);
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<std::size_t>{0, 2});
  for (const auto& p : picks) CHECK(p.pseudo_label == b[p.id].predicted);
  // Unbalanced takes the two lowest EU regardless of class.
  auto plain = ids(evid::select_certain(b, bo, 2, false, 2));
  std::sort(plain.begin(), plain.end());
  CHECK(plain == std::vector<std::size_t>{0, 1});
}

TEST_CASE("balanced certainty fills class shortfalls by global EU") {
  // Class 1 has a single member; quota 2 per class with b_c = 4.
  std::vector<ScoredSample> s{{0, 0.1, 0, 0}, {1, 0.2, 0, 0}, {2, 0.3, 0, 0}, {3, 0.4, 0, 0}, {4, 0.9, 0, 1}};
  const EpistemicOrdering order(s);
  auto got = ids(evid::select_certain(s, order, 4, true, 2));
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<std::size_t>{0, 1, 2, 4});
  // Soft behaviour: asking for more than exists returns everything.
  CHECK(evid::select_certain(s, order, 10, false, 2).size() == 5);
}

TEST_CASE("balanced certainty per-class counts differ by at most one") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoredSample> s;
  for (std::size_t i = 0; i < 300; ++i) s.push_back({i, u(rng), u(rng), i % 4});
  const EpistemicOrdering order(s);
  for (std::size_t bc : {4u, 7u, 22u, 41u}) {
    const auto picks = evid::select_certain(s, order, bc, true, 4);
    CHECK(picks.size() == bc);
    std::vector<std::size_t> count(4, 0);
    for (const auto& p : picks) ++count[p.pseudo_label];
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    CHECK(*hi - *lo <= bc % 4 + 1);
    CHECK(*lo >= bc / 4);
  }
}

TEST_CASE("select_round shares one EU sort and keeps selections disjoint") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoredSample> s;
  for (std::size_t i = 0; i < 200; ++i) s.push_back({i * 3, u(rng), u(rng), i % 5});
  const RoundPlan plan{1, 5, 30, 10};
  const std::size_t before = EpistemicOrdering::sorts_on_this_thread();
  const auto sel = evid::select_round(s, plan, {}, 5);
  CHECK(EpistemicOrdering::sorts_on_this_thread() - before == 1);
  CHECK(sel.epistemic_sorts == 1);
  CHECK(sel.uncertain.size() == 5);
  CHECK(sel.certain.size() == 30);
  std::set<std::size_t> all(sel.uncertain.begin(), sel.uncertain.end());
  for (const auto& p : sel.certain) all.insert(p.id);
  CHECK(all.size() == 35);

  // The certain picks are the lowest-EU entries of the same ordering.
  const EpistemicOrdering order(s);
  std::vector<double> certain_eu;
  for (const auto& p : sel.certain) certain_eu.push_back(s[p.id / 3].epistemic);
  const double worst_certain = *std::max_element(certain_eu.begin(), certain_eu.end());
  std::size_t below = 0;
  for (const auto& x : s) below += x.epistemic <= worst_certain;
  CHECK(below >= 30);

  // Overlap of the two regions is the degenerate case that errors.
  CHECK_THROWS_AS(evid::select_round(s, RoundPlan{1, 5, 160, 10}, {}, 5), std::invalid_argument);
  CHECK_THROWS_AS(evid::select_round(s, RoundPlan{1, 25, 0, 10}, {}, 5), std::invalid_argument);
  evid::SamplingSwitches cs_only;
  cs_only.uncertainty = false;
  CHECK(evid::select_round(s, RoundPlan{1, 5, 160, 10}, cs_only, 5).certain.size() == 160);
}

TEST_CASE("round plans") {
  const auto plans = evid::make_round_plans(2000, 100, 5, 10, 0.01);
  REQUIRE(plans.size() == 5);
  std::size_t total = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(plans[k].round == k + 1);
    CHECK(plans[k].uncertain_count == 20);
    CHECK(plans[k].certain_count == 20 * (k + 1));
    CHECK(plans[k].kappa == 10);
    total += plans[k].uncertain_count;
  }
  CHECK(total == 100);
  const auto odd = evid::make_round_plans(100, 7, 3, 2, 0.0);
  CHECK(odd[0].uncertain_count + odd[1].uncertain_count + odd[2].uncertain_count == 7);
  CHECK(odd[2].uncertain_count >= odd[0].uncertain_count);
}

TEST_CASE("pool-level sampling moves samples and spends budget") {
  auto pool = small_pool(400, 30.0, 4);
  const auto model = evid::EvidentialMLP::glorot({2, 8, 5}, 9);
  const RoundPlan plan{1, 10, 40, 5};
  const auto chosen = evid::uncertainty_sampling(pool, model, plan, evid::QuantMode::variance);
  CHECK(chosen.size() == 10);
  CHECK(pool.budget_spent() == 10);
  const auto picks = evid::certainty_sampling(pool, model, plan, true, evid::QuantMode::entropy);
  CHECK(picks.size() == 40);
  CHECK(pool.budget_spent() == 10);
  CHECK(pool.target_labeled().size() == 50);
  CHECK(pool.target_unlabeled().size() == 350);
  pool.check_invariants();

  const RoundPlan none{1, 0, 0, 5};
  CHECK(evid::uncertainty_sampling(pool, model, none, evid::QuantMode::variance).empty());
  CHECK(pool.target_labeled().size() == 50);
  const RoundPlan too_big{1, 11, 0, 5};
  CHECK_THROWS(evid::uncertainty_sampling(pool, model, too_big, evid::QuantMode::variance));
}

TEST_CASE("run_ada: budget, conservation, determinism") {
  auto fresh = [] { return small_pool(400, 30.0, 5); };
  auto pool = fresh();
  const auto cfg = small_ada(400, pool.budget_total());
  auto model = evid::EvidentialMLP::glorot({2, 16, 16, 5}, 3);
  const auto report = evid::run_ada(pool, model, cfg);

  CHECK(report.budget_spent == pool.budget_total());
  CHECK(report.oracle_labeled == pool.budget_total());
  CHECK(report.rounds.size() == 2);
  CHECK(report.epoch_target_accuracy.size() == 6);
  std::size_t spent = 0;
  for (const auto& r : report.rounds) {
    spent += r.uncertain_selected;
    CHECK(r.budget_spent == spent);
    CHECK(r.epistemic_sorts == 1);
  }
  CHECK(pool.source().size() == 400);
  CHECK(pool.target_labeled().size() + pool.target_unlabeled().size() == 400);
  CHECK(report.selection_log.size() == pool.target_labeled().size());
  pool.check_invariants();

  auto pool2 = fresh();
  auto model2 = evid::EvidentialMLP::glorot({2, 16, 16, 5}, 3);
  const auto again = evid::run_ada(pool2, model2, cfg);
  REQUIRE(again.selection_log.size() == report.selection_log.size());
  for (std::size_t i = 0; i < report.selection_log.size(); ++i) {
    CHECK(again.selection_log[i].sample_id == report.selection_log[i].sample_id);
    CHECK(again.selection_log[i].type == report.selection_log[i].type);
  }
  CHECK(model.flat_parameters() == model2.flat_parameters());
}

TEST_CASE("run_ada with no rounds equals plain UG training") {
  auto pool = small_pool(300, 30.0, 6);
  auto cfg = small_ada(300, pool.budget_total());
  cfg.rounds.clear();
  cfg.sampling_epochs.clear();
  auto a = evid::EvidentialMLP::glorot({2, 16, 16, 5}, 3);
  auto b = a;
  const auto report = evid::run_ada(pool, a, cfg);
  CHECK(report.rounds.empty());
  CHECK(report.budget_spent == 0);
  auto pool2 = small_pool(300, 30.0, 6);
  evid::train(b, pool2, cfg.train, cfg.loss);
  CHECK(a.flat_parameters() == b.flat_parameters());
}

TEST_CASE("run_ada rejects inconsistent schedules") {
  auto pool = small_pool(300, 30.0, 6);
  auto cfg = small_ada(300, pool.budget_total());
  cfg.sampling_epochs = {2};
  auto m = evid::EvidentialMLP::glorot({2, 16, 16, 5}, 3);
  CHECK_THROWS_AS(evid::run_ada(pool, m, cfg), std::invalid_argument);
  cfg.sampling_epochs = {4, 2};
  CHECK_THROWS_AS(evid::run_ada(pool, m, cfg), std::invalid_argument);
  cfg.sampling_epochs = {2, 9};
  CHECK_THROWS_AS(evid::run_ada(pool, m, cfg), std::invalid_argument);
}
