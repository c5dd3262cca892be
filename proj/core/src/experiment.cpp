#include "evid/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "evid/records.hpp"

namespace evid {
namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid experiment config:";
  for (const auto& i : issues) out += "\n  - " + i;
  return out;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Reads optional fields of one JSON object, collecting type errors instead
// of stopping at the first.
class FieldReader {
 public:
  FieldReader(const nlohmann::json& obj, std::string prefix, std::vector<std::string>& issues)
      : obj_(obj), prefix_(std::move(prefix)), issues_(issues) {
    if (!obj_.is_object()) {
      issues_.push_back(label("") + "must be an object");
      valid_ = false;
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    if (!valid_ || !obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      issues_.push_back(label(key) + "has the wrong type");
    }
  }

  void read_count(const char* key, std::size_t& out) {
    if (!valid_ || !obj_.contains(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      issues_.push_back(label(key) + "must be a non-negative integer");
      return;
    }
    out = v.get<std::size_t>();
  }

  const nlohmann::json* child(const char* key) const {
    if (!valid_ || !obj_.contains(key)) return nullptr;
    return &obj_.at(key);
  }

  std::string label(const std::string& key) const {
    return (key.empty() ? prefix_ : prefix_ + "." + key) + ": ";
  }

 private:
  const nlohmann::json& obj_;
  std::string prefix_;
  std::vector<std::string>& issues_;
  bool valid_ = true;
};

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw std::invalid_argument("ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

template <typename Fn>
void check(std::vector<std::string>& issues, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    issues.push_back(e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <typename Writer>
void write_with(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
}

nlohmann::json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.stddev}}; }

template <typename Job>
void parallel_for(std::size_t count, std::size_t workers, Job&& job) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(count);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::pair<Dataset, Dataset> load_datasets(const ExperimentConfig& cfg) {
  auto load = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset " + path);
    return read_dataset_csv(in);
  };
  Dataset source = load(cfg.source_csv);
  Dataset target = load(cfg.target_csv);
  if (source.feature_dim() != cfg.domain.feature_dim || target.feature_dim() != cfg.domain.feature_dim) {
    throw std::runtime_error("dataset feature count differs from domain.feature_dim");
  }
  for (const Dataset* ds : {&source, &target}) {
    for (ClassIndex c : ds->labels) {
      if (c >= cfg.domain.num_classes) throw std::runtime_error("dataset label outside domain.num_classes");
    }
  }
  return {std::move(source), std::move(target)};
}

}  // namespace

double default_lambda_e(QuantMode mode) { return mode == QuantMode::variance ? 50.0 : 1.0; }

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

void ExperimentConfig::validate() const {
  std::vector<std::string> issues;
  if (schema_version != kConfigSchemaVersion) {
    issues.push_back("schema_version: unsupported version " + std::to_string(schema_version));
  }
  if (name.empty()) issues.push_back("name: must not be empty");
  check(issues, [&] { domain.validate(); });
  check(issues, [&] { train.validate(); });
  if (train.epochs == 0) issues.push_back("train.epochs: must be > 0");
  check(issues, [&] { loss.validate(); });
  if (!(active.budget_fraction >= 0.0 && active.budget_fraction <= 1.0)) {
    issues.push_back("active.budget_fraction: must lie in [0, 1]");
  }
  if (active.kappa == 0) issues.push_back("active.kappa: must be >= 1");
  if (!(active.certain_step_fraction >= 0.0 && active.certain_step_fraction <= 1.0)) {
    issues.push_back("active.certain_step_fraction: must lie in [0, 1]");
  }
  if (active.sampling_epochs.size() != active.rounds) {
    issues.push_back("active.sampling_epochs: expected " + std::to_string(active.rounds) +
                     " entries (one per round)");
  }
  for (std::size_t k = 0; k < active.sampling_epochs.size(); ++k) {
    const std::size_t e = active.sampling_epochs[k];
    if (e == 0 || e > train.epochs) {
      issues.push_back("active.sampling_epochs: epoch " + std::to_string(e) + " outside 1.." +
                       std::to_string(train.epochs));
    }
    if (k > 0 && e <= active.sampling_epochs[k - 1]) {
      issues.push_back("active.sampling_epochs: must be strictly increasing");
    }
  }
  if (active.auroc_epoch > train.epochs) {
    issues.push_back("active.auroc_epoch: beyond train.epochs");
  }
  if (seeds.empty()) issues.push_back("seeds: at least one seed is required");
  if (source_csv.empty() != target_csv.empty()) {
    issues.push_back("data: source_csv and target_csv must be given together");
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.domain.num_classes = 5;
  cfg.domain.feature_dim = 2;
  cfg.domain.samples_per_domain = 2000;
  cfg.domain.mean_radius = 3.0;
  cfg.domain.cluster_std = 1.0;
  cfg.domain.shift.rotation_deg = 25.0;
  cfg.domain.shift.translation = Vector::Zero(2);
  cfg.train.epochs = 24;
  cfg.loss.mode = cfg.mode;
  cfg.loss.lambda_a = 0.05;
  cfg.loss.lambda_e = default_lambda_e(cfg.mode);
  return cfg;
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg = default_experiment_config();
  std::vector<std::string> issues;
  FieldReader root(j, "config", issues);
  root.read("schema_version", cfg.schema_version);
  root.read("name", cfg.name);
  if (const auto* m = root.child("mode")) {
    try {
      cfg.mode = parse_quant_mode(m->get<std::string>());
      cfg.loss.lambda_e = default_lambda_e(cfg.mode);
    } catch (const std::exception&) {
      issues.push_back("mode: must be \"variance\" or \"entropy\"");
    }
  }
  root.read("seeds", cfg.seeds);
  root.read("output_dir", cfg.output_dir);

  if (const auto* d = root.child("domain")) {
    FieldReader r(*d, "domain", issues);
    r.read_count("num_classes", cfg.domain.num_classes);
    r.read_count("feature_dim", cfg.domain.feature_dim);
    r.read_count("samples_per_domain", cfg.domain.samples_per_domain);
    r.read("mean_radius", cfg.domain.mean_radius);
    r.read("cluster_std", cfg.domain.cluster_std);
    r.read("seed", cfg.domain.seed);
    if (const auto* means = r.child("class_means")) {
      try {
        cfg.domain.class_means = means->is_null() ? Matrix() : matrix_from_json(*means);
      } catch (const std::exception&) {
        issues.push_back("domain.class_means: must be a rectangular array of number rows");
      }
    }
    if (const auto* s = r.child("shift")) {
      FieldReader sr(*s, "domain.shift", issues);
      sr.read("rotation_deg", cfg.domain.shift.rotation_deg);
      sr.read("noise_multiplier", cfg.domain.shift.noise_multiplier);
      std::vector<double> t;
      bool has_t = sr.child("translation") != nullptr;
      sr.read("translation", t);
      if (has_t) cfg.domain.shift.translation = Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size()));
    }
  }
  // An all-zero default translation follows feature_dim.
  if (cfg.domain.shift.translation.isZero(0.0)) {
    cfg.domain.shift.translation = Vector::Zero(static_cast<Eigen::Index>(cfg.domain.feature_dim));
  }

  if (const auto* t = root.child("train")) {
    FieldReader r(*t, "train", issues);
    r.read_count("epochs", cfg.train.epochs);
    r.read_count("batch_size", cfg.train.batch_size);
    r.read("learning_rate", cfg.train.learning_rate);
    r.read("momentum", cfg.train.momentum);
    r.read("weight_decay", cfg.train.weight_decay);
    r.read("hidden_layers", cfg.train.hidden_layers);
    if (const auto* s = r.child("lr_schedule")) {
      FieldReader sr(*s, "train.lr_schedule", issues);
      std::string kind = cfg.train.lr_schedule.kind == LrSchedule::Kind::constant ? "constant" : "inverse_decay";
      sr.read("kind", kind);
      if (kind == "constant") {
        cfg.train.lr_schedule.kind = LrSchedule::Kind::constant;
      } else if (kind == "inverse_decay") {
        cfg.train.lr_schedule.kind = LrSchedule::Kind::inverse_decay;
      } else {
        issues.push_back("train.lr_schedule.kind: must be \"constant\" or \"inverse_decay\"");
      }
      sr.read("gamma", cfg.train.lr_schedule.gamma);
      sr.read("beta", cfg.train.lr_schedule.beta);
    }
  }

  cfg.loss.lambda_e = default_lambda_e(cfg.mode);
  if (const auto* l = root.child("loss")) {
    FieldReader r(*l, "loss", issues);
    if (const auto* reg = r.child("lambda_reg")) {
      if (reg->is_null()) {
        cfg.loss.lambda_reg.reset();
      } else if (reg->is_number()) {
        cfg.loss.lambda_reg = reg->get<double>();
      } else {
        issues.push_back("loss.lambda_reg: must be a number or null (1/C)");
      }
    }
    r.read("lambda_a", cfg.loss.lambda_a);
    r.read("lambda_e", cfg.loss.lambda_e);
    r.read("pseudo_label_weight", cfg.loss.pseudo_label_weight);
    std::string reduction = cfg.loss.reduction == Reduction::mean ? "mean" : "sum";
    r.read("reduction", reduction);
    if (reduction == "mean") {
      cfg.loss.reduction = Reduction::mean;
    } else if (reduction == "sum") {
      cfg.loss.reduction = Reduction::sum;
    } else {
      issues.push_back("loss.reduction: must be \"mean\" or \"sum\"");
    }
  }

  if (const auto* d = root.child("data")) {
    FieldReader r(*d, "data", issues);
    r.read("source_csv", cfg.source_csv);
    r.read("target_csv", cfg.target_csv);
  }

  if (const auto* a = root.child("active")) {
    FieldReader r(*a, "active", issues);
    r.read("budget_fraction", cfg.active.budget_fraction);
    r.read_count("rounds", cfg.active.rounds);
    r.read_count("kappa", cfg.active.kappa);
    r.read("certain_step_fraction", cfg.active.certain_step_fraction);
    r.read("sampling_epochs", cfg.active.sampling_epochs);
    r.read_count("auroc_epoch", cfg.active.auroc_epoch);
    r.read_count("top_pairs", cfg.active.top_pairs);
  }

  if (const auto* s = root.child("ablation")) {
    FieldReader r(*s, "ablation", issues);
    r.read("uncertainty_guidance", cfg.ablation.uncertainty_guidance);
    r.read("uncertainty_sampling", cfg.ablation.uncertainty_sampling);
    r.read("certainty_sampling", cfg.ablation.certainty_sampling);
    r.read("class_balanced", cfg.ablation.class_balanced);
  }

  cfg.loss.mode = cfg.mode;
  if (!issues.empty()) throw ConfigError(std::move(issues));
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  using nlohmann::json;
  const auto& d = cfg.domain;
  json translation = json::array();
  for (Eigen::Index k = 0; k < d.shift.translation.size(); ++k) translation.push_back(d.shift.translation[k]);
  return {
      {"schema_version", cfg.schema_version},
      {"name", cfg.name},
      {"mode", std::string(to_string(cfg.mode))},
      {"seeds", cfg.seeds},
      {"output_dir", cfg.output_dir},
      {"domain",
       {{"num_classes", d.num_classes},
        {"feature_dim", d.feature_dim},
        {"samples_per_domain", d.samples_per_domain},
        {"class_means", d.class_means.size() == 0 ? json(nullptr) : matrix_json(d.class_means)},
        {"mean_radius", d.mean_radius},
        {"cluster_std", d.cluster_std},
        {"seed", d.seed},
        {"shift",
         {{"translation", translation},
          {"rotation_deg", d.shift.rotation_deg},
          {"noise_multiplier", d.shift.noise_multiplier}}}}},
      {"train",
       {{"epochs", cfg.train.epochs},
        {"batch_size", cfg.train.batch_size},
        {"learning_rate", cfg.train.learning_rate},
        {"momentum", cfg.train.momentum},
        {"weight_decay", cfg.train.weight_decay},
        {"hidden_layers", cfg.train.hidden_layers},
        {"lr_schedule",
         {{"kind", cfg.train.lr_schedule.kind == LrSchedule::Kind::constant ? "constant" : "inverse_decay"},
          {"gamma", cfg.train.lr_schedule.gamma},
          {"beta", cfg.train.lr_schedule.beta}}}}},
      {"loss",
       {{"lambda_reg", cfg.loss.lambda_reg ? json(*cfg.loss.lambda_reg) : json(nullptr)},
        {"lambda_a", cfg.loss.lambda_a},
        {"lambda_e", cfg.loss.lambda_e},
        {"reduction", cfg.loss.reduction == Reduction::mean ? "mean" : "sum"},
        {"pseudo_label_weight", cfg.loss.pseudo_label_weight}}},
      {"active",
       {{"budget_fraction", cfg.active.budget_fraction},
        {"rounds", cfg.active.rounds},
        {"kappa", cfg.active.kappa},
        {"certain_step_fraction", cfg.active.certain_step_fraction},
        {"sampling_epochs", cfg.active.sampling_epochs},
        {"auroc_epoch", cfg.active.auroc_epoch},
        {"top_pairs", cfg.active.top_pairs}}},
      {"data", {{"source_csv", cfg.source_csv}, {"target_csv", cfg.target_csv}}},
      {"ablation",
       {{"uncertainty_guidance", cfg.ablation.uncertainty_guidance},
        {"uncertainty_sampling", cfg.ablation.uncertainty_sampling},
        {"certainty_sampling", cfg.ablation.certainty_sampling},
        {"class_balanced", cfg.ablation.class_balanced}}},
  };
}

std::string config_hash(const ExperimentConfig& cfg) {
  nlohmann::json j = to_json(cfg);
  j.erase("seeds");
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  DomainSpec spec = cfg.domain;
  spec.seed = mix_seed(cfg.domain.seed, seed);
  auto [source, target] = cfg.source_csv.empty() ? generate_domain_pair(spec) : load_datasets(cfg);
  SamplePool pool = split_pools(std::move(source), std::move(target), cfg.active.budget_fraction);

  TrainConfig train = cfg.train;
  train.seed = mix_seed(seed, 0x7261696eULL);
  std::vector<std::size_t> arch{spec.feature_dim};
  arch.insert(arch.end(), train.hidden_layers.begin(), train.hidden_layers.end());
  arch.push_back(spec.num_classes);
  EvidentialMLP model = EvidentialMLP::glorot(arch, mix_seed(seed, 0x696e6974ULL));

  AdaConfig ada;
  ada.train = train;
  ada.loss = cfg.loss;
  ada.loss.mode = cfg.mode;
  ada.sampling_epochs = cfg.active.sampling_epochs;
  ada.rounds = make_round_plans(pool.target_size(), pool.budget_total(), cfg.active.rounds,
                                cfg.active.kappa, cfg.active.certain_step_fraction);
  ada.uncertainty_guidance = cfg.ablation.uncertainty_guidance;
  ada.sampling.uncertainty = cfg.ablation.uncertainty_sampling;
  ada.sampling.certainty = cfg.ablation.certainty_sampling;
  ada.sampling.class_balanced = cfg.ablation.class_balanced;
  ada.auroc_epoch = cfg.active.auroc_epoch;
  ada.top_pairs = cfg.active.top_pairs;

  SeedRun run;
  run.seed = seed;
  run.report = run_ada(pool, model, ada);
  run.report.seed = seed;
  run.histograms = export_uncertainty_histograms(model, pool.source(), pool.evaluation_target(), cfg.mode);
  const auto preds = model.predict(pool.target_features());
  std::vector<ClassIndex> predicted(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) predicted[i] = predict_class(preds[i]);
  run.class_pairs = rank_class_pairs(dataset_correlation_matrix(preds, predicted, spec.num_classes));
  run.checkpoint = model_checkpoint(model);
  return run;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::size_t workers_from_env() {
  if (const char* env = std::getenv("EVID_NUM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t workers) {
  cfg.validate();
  if (workers == 0) workers = workers_from_env();
  ExperimentResult result;
  result.runs.resize(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), workers,
               [&](std::size_t i) { result.runs[i] = run_seed(cfg, cfg.seeds[i]); });
  std::vector<double> acc;
  for (const auto& r : result.runs) acc.push_back(r.report.final_accuracy);
  result.final_accuracy = summarize(acc);
  return result;
}

std::vector<std::pair<std::string, AblationSwitches>> ablation_patterns(bool class_balanced) {
  auto row = [&](bool ug, bool us, bool cs) {
    return AblationSwitches{ug, us, cs, class_balanced};
  };
  return {{"Source", row(false, false, false)},
          {"+UG", row(true, false, false)},
          {"+US", row(false, true, false)},
          {"+UG+US", row(true, true, false)},
          {"+UG+US+CS", row(true, true, true)}};
}

std::vector<AblationRow> run_ablation(const ExperimentConfig& cfg, std::size_t workers) {
  cfg.validate();
  if (workers == 0) workers = workers_from_env();
  const auto patterns = ablation_patterns(cfg.ablation.class_balanced);
  const std::size_t n_seeds = cfg.seeds.size();
  std::vector<double> acc(patterns.size() * n_seeds);
  parallel_for(acc.size(), workers, [&](std::size_t job) {
    ExperimentConfig row_cfg = cfg;
    row_cfg.ablation = patterns[job / n_seeds].second;
    acc[job] = run_seed(row_cfg, cfg.seeds[job % n_seeds]).report.final_accuracy;
  });
  std::vector<AblationRow> rows;
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    AblationRow row{patterns[p].first, patterns[p].second, {}, {}};
    row.accuracies.assign(acc.begin() + static_cast<std::ptrdiff_t>(p * n_seeds),
                          acc.begin() + static_cast<std::ptrdiff_t>((p + 1) * n_seeds));
    row.accuracy = summarize(row.accuracies);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::filesystem::path run_directory(const ExperimentConfig& cfg) {
  return std::filesystem::path(cfg.output_dir) / (cfg.name + "-" + config_hash(cfg));
}

void write_run_directory(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                         const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
  nlohmann::json per_seed = nlohmann::json::array();
  for (const auto& run : result.runs) {
    const fs::path seed_dir = dir / ("seed_" + std::to_string(run.seed));
    fs::create_directories(seed_dir);
    write_text(seed_dir / "report.json", to_json(run.report).dump(2) + "\n");
    write_text(seed_dir / "model.json", run.checkpoint.dump() + "\n");
    write_with(seed_dir / "selection_log.csv",
               [&](std::ostream& o) { write_selection_log_csv(o, run.report.selection_log); });
    write_with(seed_dir / "histograms.csv", [&](std::ostream& o) { write_histogram_csv(o, run.histograms); });
    write_with(seed_dir / "loss_curve.csv",
               [&](std::ostream& o) { write_loss_curve_csv(o, run.report.loss_curve); });
    write_with(seed_dir / "class_correlations.csv",
               [&](std::ostream& o) { write_pair_correlation_csv(o, run.class_pairs); });
    per_seed.push_back({{"seed", run.seed}, {"final_accuracy", run.report.final_accuracy}});
  }
  const nlohmann::json aggregate = {{"name", cfg.name},
                                    {"config_hash", config_hash(cfg)},
                                    {"mode", std::string(to_string(cfg.mode))},
                                    {"final_accuracy", summary_json(result.final_accuracy)},
                                    {"seeds", per_seed}};
  write_text(dir / "aggregate.json", aggregate.dump(2) + "\n");
}

void write_ablation(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                    const std::vector<AblationRow>& rows) {
  std::filesystem::create_directories(dir);
  write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
  nlohmann::json table = nlohmann::json::array();
  std::ostringstream csv;
  csv << "row,ug,us,cs,mean_accuracy,std_accuracy\n";
  for (const auto& r : rows) {
    table.push_back({{"row", r.name},
                     {"uncertainty_guidance", r.switches.uncertainty_guidance},
                     {"uncertainty_sampling", r.switches.uncertainty_sampling},
                     {"certainty_sampling", r.switches.certainty_sampling},
                     {"accuracies", r.accuracies},
                     {"accuracy", summary_json(r.accuracy)}});
    csv << r.name << ',' << r.switches.uncertainty_guidance << ',' << r.switches.uncertainty_sampling
        << ',' << r.switches.certainty_sampling << ',' << r.accuracy.mean << ',' << r.accuracy.stddev
        << '\n';
  }
  write_text(dir / "ablation.json",
             nlohmann::json({{"config_hash", config_hash(cfg)}, {"seeds", cfg.seeds}, {"rows", table}})
                     .dump(2) +
                 "\n");
  write_text(dir / "ablation.csv", csv.str());
}

}  // namespace evid
