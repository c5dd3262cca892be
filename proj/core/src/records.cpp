#include "evid/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace evid {
namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, "not a number: '" + std::string(field) + "'");
  }
  return v;
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

DirichletPrediction prediction_at(const std::vector<double>& alpha, std::size_t line) {
  try {
    return DirichletPrediction::from_external(alpha);
  } catch (const std::domain_error& e) {
    throw std::domain_error("line " + std::to_string(line) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

std::vector<double> alpha_from_json(const nlohmann::json& j, std::size_t line) {
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("alpha")) throw ParseError(line, "record has no \"alpha\" field");
    arr = &j.at("alpha");
  }
  if (!arr->is_array()) throw ParseError(line, "expected an array of numbers");
  std::vector<double> alpha;
  for (const auto& v : *arr) {
    if (!v.is_number()) throw ParseError(line, "alpha entries must be numbers");
    alpha.push_back(v.get<double>());
  }
  return alpha;
}

std::vector<DirichletPrediction> read_csv_alphas(const std::string& text) {
  std::vector<DirichletPrediction> out;
  std::istringstream lines(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(lines, raw)) {
    ++line;
    const std::string_view row = trim(raw);
    if (row.empty() || row.front() == '#') continue;
    std::vector<double> alpha;
    for (std::string_view field : split(row, ',')) alpha.push_back(parse_number(field, line));
    out.push_back(prediction_at(alpha, line));
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::vector<DirichletPrediction> read_alpha_vectors(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string_view body = trim(text);
  if (body.empty()) return {};
  if (body.front() != '[' && body.front() != '{') return read_csv_alphas(text);

  // JSON lines when the first non-blank line is a complete value by itself.
  std::istringstream lines(text);
  std::string raw;
  std::size_t line = 0;
  std::string first_line;
  while (std::getline(lines, raw)) {
    ++line;
    if (!trim(raw).empty()) {
      first_line = raw;
      break;
    }
  }
  const auto first = nlohmann::json::parse(first_line, nullptr, false);
  const bool json_lines = !first.is_discarded() &&
                          (first.is_object() || (first.is_array() && (first.empty() || first.front().is_number())));
  std::vector<DirichletPrediction> out;
  if (json_lines) {
    std::istringstream again(text);
    line = 0;
    while (std::getline(again, raw)) {
      ++line;
      if (trim(raw).empty()) continue;
      const auto j = nlohmann::json::parse(raw, nullptr, false);
      if (j.is_discarded()) throw ParseError(line, "invalid JSON");
      out.push_back(prediction_at(alpha_from_json(j, line), line));
    }
    return out;
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "invalid JSON");
  }
  if (!doc.is_array()) throw ParseError(1, "expected a JSON array of alpha vectors");
  // Element line numbers are not tracked by the parser; report the index.
  for (std::size_t k = 0; k < doc.size(); ++k) {
    try {
      out.push_back(DirichletPrediction::from_external(alpha_from_json(doc[k], 0)));
    } catch (const std::domain_error& e) {
      throw std::domain_error("record " + std::to_string(k) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(0, "record " + std::to_string(k) + ": " + e.what());
    }
  }
  return out;
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const UncertaintyBundle& u) {
  nlohmann::json j = {{"mode", std::string(to_string(u.mode))},
                      {"total", u.sample_total},
                      {"aleatoric", u.sample_aleatoric},
                      {"epistemic", u.sample_epistemic}};
  if (u.mode == QuantMode::variance) {
    auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    j["class_total"] = vec(u.class_total);
    j["class_aleatoric"] = vec(u.class_aleatoric);
    j["class_epistemic"] = vec(u.class_epistemic);
  }
  return j;
}

nlohmann::json quantify_record(const DirichletPrediction& pred) {
  const CovarianceBundle cov = covariance_bundle(pred);
  const Vector& a = pred.alpha();
  return {{"alpha", std::vector<double>(a.data(), a.data() + a.size())},
          {"prediction", predict_class(pred)},
          {"uncertainty",
           {{"variance", to_json(sample_uncertainty_variance(pred))},
            {"entropy", to_json(sample_uncertainty_entropy(pred))}}},
          {"covariance",
           {{"total", matrix_json(cov.total)},
            {"aleatoric", matrix_json(cov.aleatoric)},
            {"epistemic", matrix_json(cov.epistemic)}}},
          {"correlation", matrix_json(cov.correlation)}};
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out << "sample_id,domain,label";
  for (std::size_t k = 0; k < ds.feature_dim(); ++k) out << ",f" << (k + 1);
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << i << ',' << ds.domain << ',' << ds.labels[i];
    for (Eigen::Index k = 0; k < ds.features.cols(); ++k) {
      out << ',' << fmt_double(ds.features(static_cast<Eigen::Index>(i), k));
    }
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  if (!std::getline(in, raw)) throw ParseError(1, "missing header");
  ++line;
  const auto header = split(trim(raw), ',');
  if (header.size() < 4 || header[0] != "sample_id" || header[1] != "domain" || header[2] != "label") {
    throw ParseError(line, "header must be sample_id,domain,label,f1..fd");
  }
  const std::size_t dim = header.size() - 3;
  Dataset ds;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view row = trim(raw);
    if (row.empty()) continue;
    const auto fields = split(row, ',');
    if (fields.size() != header.size()) {
      throw ParseError(line, "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
    }
    const double id = parse_number(fields[0], line);
    if (id != static_cast<double>(rows.size())) {
      throw ParseError(line, "sample ids must run 0..n-1 in order");
    }
    if (rows.empty()) {
      ds.domain = std::string(fields[1]);
    } else if (fields[1] != ds.domain) {
      throw ParseError(line, "mixed domains in one dataset file");
    }
    const double label = parse_number(fields[2], line);
    if (label < 0.0 || label != std::floor(label)) throw ParseError(line, "label must be a non-negative integer");
    ds.labels.push_back(static_cast<ClassIndex>(label));
    std::vector<double> f(dim);
    for (std::size_t k = 0; k < dim; ++k) f[k] = parse_number(fields[3 + k], line);
    rows.push_back(std::move(f));
  }
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return ds;
}

nlohmann::json model_checkpoint(const EvidentialMLP& model) {
  const Vector w = model.flat_parameters();
  return {{"architecture", model.architecture()},
          {"activation", "relu"},
          {"output_activation", "exp"},
          {"weights", std::vector<double>(w.data(), w.data() + w.size())}};
}

EvidentialMLP model_from_checkpoint(const nlohmann::json& j) {
  EvidentialMLP model(j.at("architecture").get<std::vector<std::size_t>>());
  const auto w = j.at("weights").get<std::vector<double>>();
  model.set_flat_parameters(Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())));
  return model;
}

void write_loss_curve_csv(std::ostream& out, const std::vector<EpochLoss>& curve) {
  out << "epoch,supervised_loss,ug_loss\n";
  for (const auto& e : curve) {
    out << e.epoch << ',' << fmt_double(e.supervised) << ',' << fmt_double(e.unsupervised) << '\n';
  }
}

void write_selection_log_csv(std::ostream& out, const std::vector<SelectionRecord>& log) {
  out << "round,sample_id,selection_type,EU,AU,predicted_class,true_class\n";
  for (const auto& r : log) {
    out << r.round << ',' << r.sample_id << ',' << to_string(r.type) << ',' << fmt_double(r.epistemic)
        << ',' << fmt_double(r.aleatoric) << ',' << r.predicted << ',' << r.true_class << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows) {
  out << "domain,sample_id,AU,EU\n";
  for (const auto& r : rows) {
    out << r.domain << ',' << r.sample_id << ',' << fmt_double(r.aleatoric) << ','
        << fmt_double(r.epistemic) << '\n';
  }
}

void write_pair_correlation_csv(std::ostream& out, const std::vector<ClassPairCorrelation>& pairs) {
  out << "class_i,class_j,correlation\n";
  for (const auto& p : pairs) {
    out << p.first << ',' << p.second << ',' << fmt_double(p.correlation) << '\n';
  }
}

}  // namespace evid
