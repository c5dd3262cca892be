#include "evid/metrics_report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace evid {
namespace {

nlohmann::json vector_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json class_uncertainty_json(const ClassUncertainties& u) {
  return {{"total", vector_json(u.total)},
          {"aleatoric", vector_json(u.aleatoric)},
          {"epistemic", vector_json(u.epistemic)}};
}

std::optional<double> try_auroc(std::span<const double> scores, const std::vector<bool>& positive) {
  const auto pos = std::count(positive.begin(), positive.end(), true);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(positive.size())) return std::nullopt;
  return auroc(scores, positive);
}

}  // namespace

double auroc(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) {
    throw std::invalid_argument("auroc: scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  const auto n_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auroc is undefined without both positive and negative samples");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("auroc: NaN score");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the rank sum of positives, using midranks for ties; stays integral.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const std::uint64_t twice_midrank = (i + 1) + (j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (positive[order[k]]) twice_rank_sum += twice_midrank;
    }
    i = j + 1;
  }
  const std::uint64_t twice_u = twice_rank_sum - n_pos * (n_pos + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double dataset_class_correlation(std::span<const DirichletPrediction> preds,
                                 std::span<const ClassIndex> classes, ClassIndex i, ClassIndex j) {
  if (preds.size() != classes.size()) {
    throw std::invalid_argument("predictions and classes differ in length");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    if (classes[k] != i && classes[k] != j) continue;
    const std::size_t c = preds[k].num_classes();
    if (i >= c || j >= c) throw std::invalid_argument("class index out of range");
    sum += covariance_bundle(preds[k]).correlation(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(j));
    ++count;
  }
  if (count == 0) {
    throw std::invalid_argument("no samples of class " + std::to_string(i) + " or " +
                                std::to_string(j));
  }
  return std::clamp(sum / static_cast<double>(count), -1.0, 1.0);
}

Matrix dataset_correlation_matrix(std::span<const DirichletPrediction> preds,
                                  std::span<const ClassIndex> classes, std::size_t num_classes) {
  if (preds.size() != classes.size()) {
    throw std::invalid_argument("predictions and classes differ in length");
  }
  const auto n = static_cast<Eigen::Index>(num_classes);
  Matrix sums = Matrix::Zero(n, n);
  Matrix counts = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const Matrix corr = covariance_bundle(preds[k]).correlation;
    const auto c = static_cast<Eigen::Index>(classes[k]);
    if (c >= n) throw std::invalid_argument("class index out of range");
    // Sample k contributes to every pair that involves its class.
    for (Eigen::Index other = 0; other < n; ++other) {
      if (other == c) continue;
      sums(c, other) += corr(c, other);
      counts(c, other) += 1.0;
      sums(other, c) += corr(other, c);
      counts(other, c) += 1.0;
    }
  }
  Matrix out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) {
        out(a, b) = 1.0;
      } else {
        out(a, b) = counts(a, b) > 0.0 ? std::clamp(sums(a, b) / counts(a, b), -1.0, 1.0)
                                       : std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return out;
}

std::vector<ClassPairCorrelation> rank_class_pairs(const Matrix& correlations) {
  const Eigen::Index n = correlations.rows();
  if (n < 2 || correlations.cols() != n) {
    throw std::invalid_argument("rank_class_pairs needs a square matrix with >= 2 classes");
  }
  std::vector<ClassPairCorrelation> pairs;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      pairs.push_back({static_cast<ClassIndex>(i), static_cast<ClassIndex>(j), correlations(i, j)});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    const bool a_nan = std::isnan(a.correlation);
    const bool b_nan = std::isnan(b.correlation);
    if (a_nan || b_nan) return !a_nan && b_nan;
    return a.correlation < b.correlation;
  });
  return pairs;
}

std::string_view to_string(LabelSource source) {
  return source == LabelSource::labels ? "labels" : "predictions";
}

std::vector<HistogramRow> export_uncertainty_histograms(const EvidentialMLP& model,
                                                        const Dataset& source,
                                                        const Dataset& target, QuantMode mode) {
  std::vector<HistogramRow> rows;
  rows.reserve(source.size() + target.size());
  for (const Dataset* ds : {&source, &target}) {
    const auto preds = model.predict(ds->features);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const UncertaintyBundle u = quantify(preds[i], mode);
      rows.push_back({ds->domain, i, u.sample_aleatoric, u.sample_epistemic});
    }
  }
  return rows;
}

ClassUncertainties class_level_uncertainty_summary(std::span<const DirichletPrediction> preds) {
  if (preds.empty()) throw std::invalid_argument("class-level summary of an empty dataset");
  const auto c = static_cast<Eigen::Index>(preds.front().num_classes());
  ClassUncertainties mean{Vector::Zero(c), Vector::Zero(c), Vector::Zero(c)};
  for (const auto& p : preds) {
    const ClassUncertainties u = class_uncertainties(p);
    mean.total += u.total;
    mean.aleatoric += u.aleatoric;
    mean.epistemic += u.epistemic;
  }
  const double inv = 1.0 / static_cast<double>(preds.size());
  mean.total *= inv;
  mean.aleatoric *= inv;
  mean.epistemic *= inv;
  return mean;
}

ClassUncertainties class_level_uncertainty_summary(const EvidentialMLP& model,
                                                   const Matrix& features) {
  const auto preds = model.predict(features);
  return class_level_uncertainty_summary(preds);
}

std::string_view to_string(SelectionType type) {
  return type == SelectionType::uncertain ? "uncertain" : "certain";
}

MisclassificationAuroc misclassification_auroc(const EvidentialMLP& model, const Matrix& features,
                                               const std::vector<ClassIndex>& labels,
                                               std::size_t epoch) {
  const auto preds = model.predict(features);
  std::vector<bool> wrong(preds.size());
  std::vector<double> var_au(preds.size()), var_eu(preds.size());
  std::vector<double> ent_au(preds.size()), ent_eu(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    wrong[i] = predict_class(preds[i]) != labels.at(i);
    const UncertaintyBundle v = sample_uncertainty_variance(preds[i]);
    const UncertaintyBundle e = sample_uncertainty_entropy(preds[i]);
    var_au[i] = v.sample_aleatoric;
    var_eu[i] = v.sample_epistemic;
    ent_au[i] = e.sample_aleatoric;
    ent_eu[i] = e.sample_epistemic;
  }
  MisclassificationAuroc out;
  out.epoch = epoch;
  out.variance = {try_auroc(var_au, wrong), try_auroc(var_eu, wrong)};
  out.entropy = {try_auroc(ent_au, wrong), try_auroc(ent_eu, wrong)};
  return out;
}

nlohmann::json to_json(const AdaRunReport& r) {
  using nlohmann::json;
  json rounds = json::array();
  for (const auto& k : r.rounds) {
    rounds.push_back({{"round", k.round},
                      {"epoch", k.epoch},
                      {"uncertain_selected", k.uncertain_selected},
                      {"certain_selected", k.certain_selected},
                      {"target_accuracy", k.target_accuracy},
                      {"unlabeled_accuracy", k.unlabeled_accuracy},
                      {"pseudo_label_accuracy", optional_json(k.pseudo_label_accuracy)},
                      {"epistemic_sorts", k.epistemic_sorts},
                      {"budget_spent", k.budget_spent}});
  }
  json losses = json::array();
  for (const auto& l : r.loss_curve) {
    losses.push_back({{"epoch", l.epoch}, {"supervised", l.supervised}, {"ug", l.unsupervised}});
  }
  json pairs = json::array();
  for (const auto& p : r.top_pairs) {
    pairs.push_back({{"classes", {p.first, p.second}},
                     {"correlation", std::isnan(p.correlation) ? json(nullptr) : json(p.correlation)}});
  }
  json auroc_json = nullptr;
  if (r.auroc) {
    auroc_json = {{"epoch", r.auroc->epoch},
                  {"variance",
                   {{"aleatoric", optional_json(r.auroc->variance.aleatoric)},
                    {"epistemic", optional_json(r.auroc->variance.epistemic)}}},
                  {"entropy",
                   {{"aleatoric", optional_json(r.auroc->entropy.aleatoric)},
                    {"epistemic", optional_json(r.auroc->entropy.epistemic)}}}};
  }
  return {{"seed", r.seed},
          {"mode", std::string(to_string(r.mode))},
          {"final_accuracy", r.final_accuracy},
          {"epoch_target_accuracy", r.epoch_target_accuracy},
          {"loss_curve", losses},
          {"rounds", rounds},
          {"misclassification_auroc", auroc_json},
          {"pseudo_label_accuracy", optional_json(r.pseudo_label_accuracy)},
          {"budget", {{"total", r.budget_total}, {"spent", r.budget_spent}}},
          {"oracle_labeled", r.oracle_labeled},
          {"pseudo_labeled", r.pseudo_labeled},
          {"selected_samples", r.selection_log.size()},
          {"class_uncertainty",
           {{"source", class_uncertainty_json(r.source_class_uncertainty)},
            {"target", class_uncertainty_json(r.target_class_uncertainty)}}},
          {"top_class_pairs", {{"label_source", std::string(to_string(r.pair_label_source))},
                               {"pairs", pairs}}}};
}

}  // namespace evid
