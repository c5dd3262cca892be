#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "evid/experiment.hpp"

using evid::ConfigError;
using nlohmann::json;

namespace {

evid::ExperimentConfig tiny_config() {
  auto cfg = evid::default_experiment_config();
  cfg.name = "tiny";
  cfg.domain.samples_per_domain = 300;
  cfg.train.epochs = 4;
  cfg.train.hidden_layers = {8};
  cfg.active.rounds = 2;
  cfg.active.sampling_epochs = {2, 3};
  cfg.active.kappa = 3;
  cfg.seeds = {0, 1};
  return cfg;
}

}  // namespace

TEST_CASE("default config is valid and mode dependent") {
  const auto cfg = evid::default_experiment_config();
  cfg.validate();
  CHECK(cfg.loss.lambda_e == 50.0);
  CHECK(cfg.loss.lambda_a == 0.05);
  const auto ent = evid::parse_experiment_config(json{{"mode", "entropy"}});
  CHECK(ent.mode == evid::QuantMode::entropy);
  CHECK(ent.loss.mode == evid::QuantMode::entropy);
  CHECK(ent.loss.lambda_e == 1.0);
  const auto explicit_e = evid::parse_experiment_config(json{{"mode", "entropy"}, {"loss", {{"lambda_e", 3.0}}}});
  CHECK(explicit_e.loss.lambda_e == 3.0);
}

TEST_CASE("config json round-trip") {
  auto cfg = tiny_config();
  cfg.loss.lambda_reg = 0.3;
  cfg.train.lr_schedule.kind = evid::LrSchedule::Kind::constant;
  cfg.domain.shift.translation = evid::Vector{{1.5, -0.5}};
  const auto back = evid::parse_experiment_config(json::parse(evid::to_json(cfg).dump()));
  CHECK(evid::to_json(back) == evid::to_json(cfg));
  CHECK(evid::config_hash(back) == evid::config_hash(cfg));
}

TEST_CASE("config hash ignores seeds and output_dir only") {
  auto a = tiny_config();
  auto b = a;
  b.seeds = {7};
  b.output_dir = "elsewhere";
  CHECK(evid::config_hash(a) == evid::config_hash(b));
  CHECK(evid::config_hash(a).size() == 16);
  b.loss.lambda_a = 0.1;
  CHECK(evid::config_hash(a) != evid::config_hash(b));
  CHECK(evid::run_directory(a).filename().string() == "tiny-" + evid::config_hash(a));
}

TEST_CASE("config errors list every issue") {
  const json j = {{"mode", "bogus"},
                  {"train", {{"epochs", -1}, {"learning_rate", "fast"}}},
                  {"active", {{"kappa", 0}}},
                  {"loss", {{"reduction", "max"}}}};
  try {
    evid::parse_experiment_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() >= 4);
    const std::string msg = e.what();
    CHECK(msg.find("mode") != std::string::npos);
    CHECK(msg.find("train.epochs") != std::string::npos);
    CHECK(msg.find("train.learning_rate") != std::string::npos);
    CHECK(msg.find("loss.reduction") != std::string::npos);
  }
  CHECK_THROWS_AS(evid::parse_experiment_config(json{{"schema_version", 2}}), ConfigError);
  CHECK_THROWS_AS(evid::parse_experiment_config(json{{"active", {{"sampling_epochs", {10, 30, 31, 32, 33}}}}}),
                  ConfigError);
  CHECK_THROWS_AS(evid::parse_experiment_config(json{{"train", 3}}), ConfigError);
}

TEST_CASE("summary statistics") {
  const auto s = evid::summarize({1.0, 2.0, 3.0});
  CHECK(s.mean == 2.0);
  CHECK(s.stddev == doctest::Approx(1.0));
  CHECK(evid::summarize({4.0}).stddev == 0.0);
}

TEST_CASE("ablation patterns") {
  const auto p = evid::ablation_patterns(true);
  REQUIRE(p.size() == 5);
  CHECK(p[0].first == "Source");
  CHECK_FALSE(p[0].second.uncertainty_guidance);
  CHECK_FALSE(p[0].second.uncertainty_sampling);
  CHECK(p[4].second.certainty_sampling);
  CHECK(p[4].second.class_balanced);
}

TEST_CASE("experiments are deterministic and independent of worker count") {
  const auto cfg = tiny_config();
  const auto one = evid::run_experiment(cfg, 1);
  const auto two = evid::run_experiment(cfg, 2);
  REQUIRE(one.runs.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(one.runs[k].seed == cfg.seeds[k]);
    CHECK(one.runs[k].checkpoint == two.runs[k].checkpoint);
    CHECK(evid::to_json(one.runs[k].report) == evid::to_json(two.runs[k].report));
  }
  CHECK(one.final_accuracy.mean == two.final_accuracy.mean);
  CHECK(one.runs[0].report.budget_spent == 15);
}

TEST_CASE("run directory layout") {
  auto cfg = tiny_config();
  cfg.seeds = {3};
  const auto dir = std::filesystem::temp_directory_path() / "evid_experiment_test";
  std::filesystem::remove_all(dir);
  const auto result = evid::run_experiment(cfg, 1);
  evid::write_run_directory(dir, cfg, result);
  for (const char* f : {"config.json", "aggregate.json"}) CHECK(std::filesystem::exists(dir / f));
  for (const char* f : {"report.json", "model.json", "selection_log.csv", "histograms.csv", "loss_curve.csv",
                        "class_correlations.csv"}) {
    CHECK(std::filesystem::exists(dir / "seed_3" / f));
  }
  std::ifstream in(dir / "config.json");
  const auto back = evid::parse_experiment_config(json::parse(in));
  CHECK(evid::config_hash(back) == evid::config_hash(cfg));
  std::filesystem::remove_all(dir);
}
