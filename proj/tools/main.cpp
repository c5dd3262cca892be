// evid: quantify Dirichlet outputs and run desk-scale active domain adaptation
// experiments.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "evid/experiment.hpp"
#include "evid/records.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigInvalid = 2,
  kRuntimeFailure = 3,
  kInputInvalid = 4,
};

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  std::string mode;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const unsigned long long v = std::stoull(item, &used);
    if (used != item.size()) throw evid::ConfigError({"--seeds: '" + item + "' is not an integer"});
    seeds.push_back(v);
  }
  if (seeds.empty()) throw evid::ConfigError({"--seeds: empty list"});
  return seeds;
}

evid::ExperimentConfig load_config(const CommonOptions& opt) {
  nlohmann::json j = nlohmann::json::object();
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw evid::ConfigError({"--config: cannot open " + opt.config_path});
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw evid::ConfigError({std::string("--config: ") + e.what()});
    }
  }
  if (!opt.out_dir.empty()) j["output_dir"] = opt.out_dir;
  if (!opt.mode.empty()) j["mode"] = opt.mode;
  if (!opt.seeds.empty()) {
    try {
      j["seeds"] = parse_seed_list(opt.seeds);
    } catch (const std::logic_error&) {
      throw evid::ConfigError({"--seeds: expected a comma-separated list of integers"});
    }
  }
  return evid::parse_experiment_config(j);
}

int cmd_quantify(const std::string& input, const std::string& output) {
  std::vector<evid::DirichletPrediction> preds;
  try {
    if (input == "-") {
      preds = evid::read_alpha_vectors(std::cin);
    } else {
      std::ifstream in(input);
      if (!in) {
        std::cerr << "error: cannot open " << input << "\n";
        return kInputInvalid;
      }
      preds = evid::read_alpha_vectors(in);
    }
  } catch (const evid::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInputInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kInputInvalid;
  }
  nlohmann::json records = nlohmann::json::array();
  for (const auto& p : preds) records.push_back(evid::quantify_record(p));
  if (output.empty()) {
    std::cout << records.dump(2) << "\n";
  } else {
    std::ofstream out(output);
    if (!out) {
      std::cerr << "error: cannot write " << output << "\n";
      return kRuntimeFailure;
    }
    out << records.dump(2) << "\n";
  }
  return kOk;
}

int cmd_run(const CommonOptions& opt) {
  const evid::ExperimentConfig cfg = load_config(opt);
  const evid::ExperimentResult result = evid::run_experiment(cfg);
  const auto dir = evid::run_directory(cfg);
  evid::write_run_directory(dir, cfg, result);
  for (const auto& run : result.runs) {
    std::cout << "seed " << run.seed << ": final target accuracy " << std::fixed
              << std::setprecision(4) << run.report.final_accuracy << "\n";
  }
  std::cout << "final accuracy " << std::fixed << std::setprecision(2)
            << 100.0 * result.final_accuracy.mean << " +- " << 100.0 * result.final_accuracy.stddev
            << " % over " << result.runs.size() << " seed(s)\n";
  std::cout << "run directory: " << dir.string() << "\n";
  return kOk;
}

void print_ablation(const std::vector<evid::AblationRow>& rows, std::ostream& out) {
  out << std::left << std::setw(12) << "row" << std::setw(6) << "UG" << std::setw(6) << "US"
      << std::setw(6) << "CS" << "accuracy (%)\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(12) << r.name << std::setw(6)
        << (r.switches.uncertainty_guidance ? "x" : "") << std::setw(6)
        << (r.switches.uncertainty_sampling ? "x" : "") << std::setw(6)
        << (r.switches.certainty_sampling ? "x" : "") << std::fixed << std::setprecision(2)
        << 100.0 * r.accuracy.mean << " +- " << 100.0 * r.accuracy.stddev << "\n";
  }
}

int cmd_ablate(const CommonOptions& opt) {
  const evid::ExperimentConfig cfg = load_config(opt);
  const auto rows = evid::run_ablation(cfg);
  const auto dir = evid::run_directory(cfg) / "ablation";
  evid::write_ablation(dir, cfg, rows);
  print_ablation(rows, std::cout);
  std::cout << "ablation table: " << (dir / "ablation.csv").string() << "\n";
  return kOk;
}

int cmd_report(const std::string& dir_text) {
  namespace fs = std::filesystem;
  const fs::path dir(dir_text);
  auto read_json = [](const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
  };
  bool printed = false;
  if (fs::exists(dir / "aggregate.json")) {
    const auto agg = read_json(dir / "aggregate.json");
    std::cout << "run " << agg.at("name").get<std::string>() << " (" << agg.at("config_hash").get<std::string>()
              << ", " << agg.at("mode").get<std::string>() << " mode)\n";
    for (const auto& s : agg.at("seeds")) {
      const auto seed = s.at("seed").get<std::uint64_t>();
      std::cout << "  seed " << seed << ": accuracy " << std::fixed << std::setprecision(4)
                << s.at("final_accuracy").get<double>();
      const fs::path report = dir / ("seed_" + std::to_string(seed)) / "report.json";
      if (fs::exists(report)) {
        const auto r = read_json(report);
        const auto& pl = r.at("pseudo_label_accuracy");
        if (!pl.is_null()) std::cout << ", pseudo-label accuracy " << pl.get<double>();
        const auto& au = r.at("misclassification_auroc");
        if (!au.is_null()) {
          const auto& v = au.at("variance");
          if (!v.at("epistemic").is_null()) std::cout << ", AUROC(EU) " << v.at("epistemic").get<double>();
          if (!v.at("aleatoric").is_null()) std::cout << ", AUROC(AU) " << v.at("aleatoric").get<double>();
        }
      }
      std::cout << "\n";
    }
    const auto& acc = agg.at("final_accuracy");
    std::cout << "  mean " << std::fixed << std::setprecision(2) << 100.0 * acc.at("mean").get<double>()
              << " +- " << 100.0 * acc.at("std").get<double>() << " %\n";
    printed = true;
  }
  const fs::path ablation = fs::exists(dir / "ablation.json") ? dir / "ablation.json"
                                                              : dir / "ablation" / "ablation.json";
  if (fs::exists(ablation)) {
    const auto table = read_json(ablation);
    std::vector<evid::AblationRow> rows;
    for (const auto& r : table.at("rows")) {
      evid::AblationRow row;
      row.name = r.at("row").get<std::string>();
      row.switches.uncertainty_guidance = r.at("uncertainty_guidance").get<bool>();
      row.switches.uncertainty_sampling = r.at("uncertainty_sampling").get<bool>();
      row.switches.certainty_sampling = r.at("certainty_sampling").get<bool>();
      row.accuracy.mean = r.at("accuracy").at("mean").get<double>();
      row.accuracy.stddev = r.at("accuracy").at("std").get<double>();
      rows.push_back(row);
    }
    print_ablation(rows, std::cout);
    printed = true;
  }
  if (!printed) {
    std::cerr << "error: no aggregate.json or ablation.json under " << dir.string() << "\n";
    return kInputInvalid;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidential uncertainty quantification and active domain adaptation experiments"};
  app.require_subcommand(1);

  std::string quantify_input;
  std::string quantify_output;
  auto* quantify = app.add_subcommand("quantify", "Uncertainty, covariance and correlation for alpha vectors");
  quantify->add_option("input", quantify_input, "CSV, JSON or JSON-lines file of alpha vectors ('-' for stdin)")
      ->required();
  quantify->add_option("-o,--output", quantify_output, "Write JSON here instead of stdout");

  CommonOptions run_opt;
  auto add_common = [](CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "Experiment config JSON");
    cmd->add_option("--out", opt.out_dir, "Output directory (overrides output_dir)");
    cmd->add_option("--seeds", opt.seeds, "Comma-separated seeds (overrides seeds)");
    cmd->add_option("--mode", opt.mode, "Quantification mode")->check(CLI::IsMember({"variance", "entropy"}));
  };
  auto* run = app.add_subcommand("run", "Run the active domain adaptation experiment for every seed");
  add_common(run, run_opt);

  CommonOptions ablate_opt;
  auto* ablate = app.add_subcommand("ablate", "Source / +UG / +US / +UG+US / +UG+US+CS comparison");
  add_common(ablate, ablate_opt);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Summarise an existing run directory");
  report->add_option("dir", report_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*quantify) return cmd_quantify(quantify_input, quantify_output);
    if (*run) return cmd_run(run_opt);
    if (*ablate) return cmd_ablate(ablate_opt);
    if (*report) return cmd_report(report_dir);
  } catch (const evid::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsage;
}
