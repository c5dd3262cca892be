#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evid/domain_sim.hpp"
#include "evid/enn_trainer.hpp"
#include "evid/evidential_core.hpp"

namespace evid {

/// Rank-based (Mann-Whitney) area under the ROC curve: the probability that
/// a positive scores above a negative, ties counting one half.
/// Throws std::invalid_argument unless both classes are present.
double auroc(std::span<const double> scores, const std::vector<bool>& positive);

/// Mean of Corr[y](i, j) over samples whose class (label or prediction) is i
/// or j. Throws std::invalid_argument when no sample qualifies.
double dataset_class_correlation(std::span<const DirichletPrediction> preds,
                                 std::span<const ClassIndex> classes, ClassIndex i, ClassIndex j);

/// Symmetric C x C matrix of dataset_class_correlation with a unit diagonal.
/// Pairs without qualifying samples are NaN.
Matrix dataset_correlation_matrix(std::span<const DirichletPrediction> preds,
                                  std::span<const ClassIndex> classes, std::size_t num_classes);

struct ClassPairCorrelation {
  ClassIndex first;
  ClassIndex second;
  double correlation;
};

/// All i < j pairs, most negative correlation first, ties in lexicographic
/// pair order, NaN entries last.
std::vector<ClassPairCorrelation> rank_class_pairs(const Matrix& correlations);

enum class LabelSource { labels, predictions };
std::string_view to_string(LabelSource source);

struct HistogramRow {
  std::string domain;
  std::size_t sample_id;
  double aleatoric;
  double epistemic;
};

/// Per-sample (domain, AU, EU) rows for the source then the target domain.
std::vector<HistogramRow> export_uncertainty_histograms(const EvidentialMLP& model,
                                                        const Dataset& source,
                                                        const Dataset& target, QuantMode mode);

/// Arithmetic mean of the class-level variance uncertainties.
ClassUncertainties class_level_uncertainty_summary(std::span<const DirichletPrediction> preds);
ClassUncertainties class_level_uncertainty_summary(const EvidentialMLP& model,
                                                   const Matrix& features);

enum class SelectionType { uncertain, certain };
std::string_view to_string(SelectionType type);

struct SelectionRecord {
  std::size_t round;
  std::size_t sample_id;
  SelectionType type;
  double epistemic;
  double aleatoric;
  ClassIndex predicted;
  ClassIndex true_class;
};

struct RoundLog {
  std::size_t round;
  std::size_t epoch;
  std::size_t uncertain_selected;
  std::size_t certain_selected;
  double target_accuracy;      // whole target domain, before this round's selection
  double unlabeled_accuracy;   // T^u before selection
  std::optional<double> pseudo_label_accuracy;
  std::size_t epistemic_sorts;
  std::size_t budget_spent;    // after the round
};

struct AurocPair {
  std::optional<double> aleatoric;
  std::optional<double> epistemic;
};

struct MisclassificationAuroc {
  std::size_t epoch;
  AurocPair variance;
  AurocPair entropy;
};

/// AUROC of AU and EU as misclassification detectors in both modes.
MisclassificationAuroc misclassification_auroc(const EvidentialMLP& model, const Matrix& features,
                                               const std::vector<ClassIndex>& labels,
                                               std::size_t epoch);

struct AdaRunReport {
  std::uint64_t seed = 0;
  QuantMode mode = QuantMode::variance;
  std::vector<double> epoch_target_accuracy;
  std::vector<EpochLoss> loss_curve;
  std::vector<RoundLog> rounds;
  double final_accuracy = 0.0;
  std::optional<MisclassificationAuroc> auroc;
  std::optional<double> pseudo_label_accuracy;
  std::size_t budget_total = 0;
  std::size_t budget_spent = 0;
  std::size_t oracle_labeled = 0;
  std::size_t pseudo_labeled = 0;
  std::vector<SelectionRecord> selection_log;
  ClassUncertainties source_class_uncertainty;
  ClassUncertainties target_class_uncertainty;
  std::vector<ClassPairCorrelation> top_pairs;
  LabelSource pair_label_source = LabelSource::predictions;
};

nlohmann::json to_json(const AdaRunReport& report);

}  // namespace evid
