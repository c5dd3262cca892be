#pragma once

// File formats: alpha-vector input, quantification records, dataset CSV,
// model checkpoints and the CSV exports written into a run directory.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evid/active_sampler.hpp"
#include "evid/domain_sim.hpp"
#include "evid/enn_trainer.hpp"
#include "evid/evidential_core.hpp"
#include "evid/metrics_report.hpp"

namespace evid {

/// Malformed input; line is 1-based (0 when unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Reads alpha vectors. Accepted layouts:
///  - CSV: one comma-separated vector per line ('#' comments and blank lines skipped)
///  - JSON: an array of arrays or of {"alpha": [...]} records
///  - JSON lines: one array or record per line
/// Throws ParseError on syntax errors and std::domain_error on non-positive
/// entries, both carrying the offending line number.
std::vector<DirichletPrediction> read_alpha_vectors(std::istream& in);

/// {"alpha", "prediction", "uncertainty": {"variance", "entropy"},
///  "covariance": {"total", "aleatoric", "epistemic"}, "correlation"}.
nlohmann::json quantify_record(const DirichletPrediction& pred);

nlohmann::json to_json(const UncertaintyBundle& u);
nlohmann::json matrix_json(const Matrix& m);

/// CSV with header sample_id,domain,label,f1..fd.
void write_dataset_csv(std::ostream& out, const Dataset& ds);
/// Reads rows written by write_dataset_csv; all rows must share one domain
/// name and feature count. Sample ids must be 0..n-1 in order.
Dataset read_dataset_csv(std::istream& in);

/// {"architecture": [...], "weights": [...]} with weights in
/// EvidentialMLP::flat_parameters order.
nlohmann::json model_checkpoint(const EvidentialMLP& model);
EvidentialMLP model_from_checkpoint(const nlohmann::json& j);

void write_loss_curve_csv(std::ostream& out, const std::vector<EpochLoss>& curve);
void write_selection_log_csv(std::ostream& out, const std::vector<SelectionRecord>& log);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows);
/// class_i,class_j,correlation in the given order.
void write_pair_correlation_csv(std::ostream& out, const std::vector<ClassPairCorrelation>& pairs);

}  // namespace evid
