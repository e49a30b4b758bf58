#include "cpml/evaluation.hpp"

#include "cpml/csv.hpp"
#include "cpml/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace cpml {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels, const char* who) {
  if (scores.size() != labels.size()) {
    throw Error(std::string(who) + ": scores and labels differ in length");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) {
      throw Error(std::string(who) + ": labels must be 0 or 1");
    }
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

} // namespace

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels, "roc_curve");
  RocCurve curve;
  for (int l : labels) {
    (l == 1 ? curve.n_pos : curve.n_neg) += 1;
  }
  if (curve.n_pos == 0 || curve.n_neg == 0) {
    throw Error("roc_curve: both classes must be present");
  }
  for (double s : scores) {
    if (std::isnan(s)) {
      throw Error("roc_curve: NaN score");
    }
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const double P = static_cast<double>(curve.n_pos);
  const double N = static_cast<double>(curve.n_neg);
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0, 0, 0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    while (k < order.size() && scores[order[k]] == s) {
      (labels[order[k]] == 1 ? tp : fp) += 1;
      ++k;
    }
    curve.points.push_back({s, static_cast<double>(fp) / N, static_cast<double>(tp) / P, fp, tp});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  if (curve.n_pos == 0 || curve.n_neg == 0) {
    throw Error("auc: both classes must be present");
  }
  // 2 * area * P * N, accumulated exactly in integers.
  unsigned long long twice = 0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    twice += static_cast<unsigned long long>(b.false_positives - a.false_positives) *
             (a.true_positives + b.true_positives);
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(curve.n_pos) * static_cast<double>(curve.n_neg));
}

double auc(std::span<const double> scores, std::span<const int> labels) { return auc(roc_curve(scores, labels)); }

double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_inputs(scores, labels, "accuracy");
  if (scores.empty()) {
    throw Error("accuracy: empty input");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int pred = scores[i] >= threshold ? 1 : 0;
    hits += pred == labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points) {
    out << csv::format_double(p.threshold) << ',' << csv::format_double(p.fpr) << ',' << csv::format_double(p.tpr)
        << '\n';
  }
}

std::vector<RocPoint> read_roc_csv(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source);
  csv::expect_header(reader, {"threshold", "fpr", "tpr"});
  std::vector<RocPoint> points;
  csv::Row row;
  while (reader.next(row)) {
    if (row.fields.size() != 3) {
      throw ParseError(source, row.line, "", "expected 3 fields");
    }
    RocPoint p;
    const char* names[] = {"threshold", "fpr", "tpr"};
    double* slots[] = {&p.threshold, &p.fpr, &p.tpr};
    for (int c = 0; c < 3; ++c) {
      const auto v = csv::parse_double(row.fields[static_cast<std::size_t>(c)].value);
      if (!v) {
        throw ParseError(source, row.line, names[c], "non-numeric value");
      }
      *slots[c] = *v;
    }
    points.push_back(p);
  }
  return points;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json doc;
  doc["model_type"] = report.model_type;
  doc["auc"] = report.auc;
  doc["accuracy"] = report.accuracy;
  doc["n_pos"] = report.n_pos;
  doc["n_neg"] = report.n_neg;
  doc["seed"] = report.seed;
  doc["config_digest"] = report.config_digest;
  return doc;
}

EvalReport report_from_json(const nlohmann::json& doc) {
  EvalReport r;
  r.model_type = doc.at("model_type").get<std::string>();
  r.auc = doc.at("auc").get<double>();
  r.accuracy = doc.at("accuracy").get<double>();
  r.n_pos = doc.at("n_pos").get<std::size_t>();
  r.n_neg = doc.at("n_neg").get<std::size_t>();
  r.seed = doc.at("seed").get<std::uint64_t>();
  r.config_digest = doc.at("config_digest").get<std::string>();
  return r;
}

EvalReport emit_report(const std::filesystem::path& dir, const RocCurve& curve, double auc_value,
                       double accuracy_value, const std::string& model_type, std::uint64_t seed,
                       const std::string& config_digest) {
  EvalReport report{model_type, auc_value, accuracy_value, curve.n_pos, curve.n_neg, seed, config_digest};
  {
    auto out = open_out(dir / ("roc_" + model_type + ".csv"));
    write_roc_csv(out, curve);
  }
  auto out = open_out(dir / ("summary_" + model_type + ".json"));
  out << to_json(report).dump(2) << '\n';
  if (!out) {
    throw Error("failed writing report for " + model_type);
  }
  return report;
}

void write_combined_summary(const std::filesystem::path& path, const std::map<std::string, EvalReport>& reports) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [type, report] : reports) {
    doc[type] = to_json(report);
  }
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

} // namespace cpml
