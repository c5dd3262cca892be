#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evid/active_sampler.hpp"
#include "evid/domain_sim.hpp"
#include "evid/edl_losses.hpp"
#include "evid/enn_trainer.hpp"
#include "evid/metrics_report.hpp"

namespace evid {

inline constexpr int kConfigSchemaVersion = 1;

/// Invalid experiment configuration; issues() lists every offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

struct ActiveSchedule {
  double budget_fraction = 0.05;
  std::size_t rounds = 5;
  std::size_t kappa = 10;
  double certain_step_fraction = 0.01;
  std::vector<std::size_t> sampling_epochs{10, 12, 14, 16, 18};
  std::size_t auroc_epoch = 0;
  std::size_t top_pairs = 4;
};

struct AblationSwitches {
  bool uncertainty_guidance = true;
  bool uncertainty_sampling = true;
  bool certainty_sampling = true;
  bool class_balanced = true;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "experiment";
  QuantMode mode = QuantMode::variance;
  DomainSpec domain;
  TrainConfig train;
  LossConfig loss;
  ActiveSchedule active;
  AblationSwitches ablation;
  /// When both are set, these dataset CSVs replace the synthetic generator.
  std::string source_csv;
  std::string target_csv;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::string output_dir = "runs";

  /// Throws ConfigError with all violations found.
  void validate() const;
};

/// EU coefficient used when a config does not set loss.lambda_e.
double default_lambda_e(QuantMode mode);

/// Desk-scale defaults: C = 5 Gaussian clusters in 2-D, |T| = 2000, B = 5 %,
/// K = 5 rounds at epochs 10..18, kappa = 10, b_c = k % of |T|.
ExperimentConfig default_experiment_config();

/// Parses and validates; unspecified fields keep their defaults.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// 16 hex digits of FNV-1a over the config without seeds and output_dir.
std::string config_hash(const ExperimentConfig& cfg);

struct SeedRun {
  std::uint64_t seed = 0;
  AdaRunReport report;
  std::vector<HistogramRow> histograms;
  std::vector<ClassPairCorrelation> class_pairs;  // all pairs on the target, ranked
  nlohmann::json checkpoint;
};

/// One full pipeline for one seed: generate data, train and sample, export.
SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single seed
};
Summary summarize(const std::vector<double>& values);

struct ExperimentResult {
  std::vector<SeedRun> runs;  // in cfg.seeds order
  Summary final_accuracy;
};

/// Runs every seed, using up to `workers` threads (0 means EVID_NUM_WORKERS
/// or 1). Results are independent of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t workers = 0);

struct AblationRow {
  std::string name;
  AblationSwitches switches;
  std::vector<double> accuracies;  // per seed
  Summary accuracy;
};

/// The five switch patterns: Source, +UG, +US, +UG+US, +UG+US+CS.
std::vector<std::pair<std::string, AblationSwitches>> ablation_patterns(bool class_balanced);

std::vector<AblationRow> run_ablation(const ExperimentConfig& cfg, std::size_t workers = 0);

/// Writes config.json, aggregate.json and seed_<s>/ {report.json,
/// selection_log.csv, histograms.csv, loss_curve.csv, class_correlations.csv,
/// model.json} under dir.
void write_run_directory(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                         const ExperimentResult& result);

void write_ablation(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                    const std::vector<AblationRow>& rows);

/// <output_dir>/<name>-<config_hash>
std::filesystem::path run_directory(const ExperimentConfig& cfg);

/// Worker count from EVID_NUM_WORKERS (>= 1), defaulting to 1.
std::size_t workers_from_env();

}  // namespace evid
