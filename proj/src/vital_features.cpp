#include "cpml/vital_features.hpp"

#include "cpml/csv.hpp"
#include "cpml/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace cpml {

namespace {

constexpr std::array kFiveStages{Stage::Normal, Stage::Mild, Stage::Moderate, Stage::Severe, Stage::VerySevere};
constexpr std::array kRespStages{Stage::Normal, Stage::Low, Stage::High, Stage::Abnormal};
constexpr std::array kSignals{SignalKind::HeartRate, SignalKind::RespRate, SignalKind::SpO2};

std::string_view prefix(SignalKind kind) {
  switch (kind) {
  case SignalKind::HeartRate: return "hr";
  case SignalKind::RespRate: return "rr";
  case SignalKind::SpO2: return "spo2";
  }
  return "";
}

std::string_view stage_suffix(Stage s) {
  switch (s) {
  case Stage::Normal: return "normal";
  case Stage::Mild: return "mild";
  case Stage::Moderate: return "moderate";
  case Stage::Severe: return "severe";
  case Stage::VerySevere: return "very_severe";
  case Stage::Low: return "low";
  case Stage::High: return "high";
  case Stage::Abnormal: return "abnormal";
  }
  return "";
}

const std::vector<double>& series_of(const VitalRecord& r, SignalKind kind) {
  switch (kind) {
  case SignalKind::HeartRate: return r.heart_rate;
  case SignalKind::RespRate: return r.resp_rate;
  case SignalKind::SpO2: return r.spo2;
  }
  return r.heart_rate;
}

} // namespace

std::string_view to_string(SignalKind kind) {
  switch (kind) {
  case SignalKind::HeartRate: return "HR";
  case SignalKind::RespRate: return "RR";
  case SignalKind::SpO2: return "SPO2";
  }
  return "?";
}

std::string_view to_string(Stage stage) {
  switch (stage) {
  case Stage::Normal: return "Normal";
  case Stage::Mild: return "Mild";
  case Stage::Moderate: return "Moderate";
  case Stage::Severe: return "Severe";
  case Stage::VerySevere: return "VerySevere";
  case Stage::Low: return "Low";
  case Stage::High: return "High";
  case Stage::Abnormal: return "Abnormal";
  }
  return "?";
}

std::span<const Stage> stages_of(SignalKind kind) {
  if (kind == SignalKind::RespRate) {
    return kRespStages;
  }
  return kFiveStages;
}

Stage stage_sample(SignalKind kind, double value) {
  switch (kind) {
  case SignalKind::HeartRate:
    if (value < 90) return Stage::Normal;
    if (value < 100) return Stage::Mild;
    if (value < 110) return Stage::Moderate;
    if (value < 120) return Stage::Severe;
    return Stage::VerySevere;
  case SignalKind::RespRate:
    if (value < 12) return Stage::Low;
    if (value < 18) return Stage::Normal;
    if (value < 20) return Stage::High;
    return Stage::Abnormal;
  case SignalKind::SpO2:
    if (value > 92) return Stage::Normal;
    if (value > 90) return Stage::Mild;
    if (value > 85) return Stage::Moderate;
    if (value > 80) return Stage::Severe;
    return Stage::VerySevere;
  }
  throw Error("stage_sample: unknown signal kind");
}

SummaryStats summary_stats(std::span<const double> series) {
  if (series.empty()) {
    throw Error("summary_stats: empty series");
  }
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  SummaryStats s;
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  // Sum in sorted order so the result does not depend on sample order.
  double sum = 0.0;
  for (double v : sorted) {
    sum += v;
  }
  s.mean = std::clamp(sum / static_cast<double>(n), s.min, s.max);

  if (n > 1) {
    double ss = 0.0;
    for (double v : sorted) {
      ss += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

std::vector<double> bucket_fractions(SignalKind kind, std::span<const double> series) {
  if (series.empty()) {
    throw Error("bucket_fractions: empty " + std::string(to_string(kind)) + " series");
  }
  const auto stages = stages_of(kind);
  std::vector<std::size_t> counts(stages.size(), 0);
  for (double v : series) {
    const Stage s = stage_sample(kind, v);
    const auto pos = std::find(stages.begin(), stages.end(), s) - stages.begin();
    counts[static_cast<std::size_t>(pos)] += 1;
  }
  std::vector<double> fractions(stages.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    fractions[i] = static_cast<double>(counts[i]) / static_cast<double>(series.size());
  }
  return fractions;
}

const std::array<std::string, kVitalFeatureCount>& vital_feature_names() {
  static const auto names = [] {
    std::array<std::string, kVitalFeatureCount> out;
    std::size_t i = 0;
    for (SignalKind kind : kSignals) {
      for (const char* stat : {"max", "min", "mean", "median", "std"}) {
        out[i++] = std::string(prefix(kind)) + "_" + stat;
      }
    }
    for (SignalKind kind : kSignals) {
      for (Stage s : stages_of(kind)) {
        out[i++] = std::string(prefix(kind)) + "_frac_" + std::string(stage_suffix(s));
      }
    }
    return out;
  }();
  return names;
}

VitalFeatureVector featurize_record(const VitalRecord& record) {
  for (SignalKind kind : kSignals) {
    if (series_of(record, kind).empty()) {
      throw Error("featurize_record: record '" + record.record_id + "' has an empty " +
                  std::string(to_string(kind)) + " series");
    }
  }
  VitalFeatureVector v{};
  std::size_t i = 0;
  for (SignalKind kind : kSignals) {
    const SummaryStats s = summary_stats(series_of(record, kind));
    v[i++] = s.max;
    v[i++] = s.min;
    v[i++] = s.mean;
    v[i++] = s.median;
    v[i++] = s.std;
  }
  for (SignalKind kind : kSignals) {
    for (double f : bucket_fractions(kind, series_of(record, kind))) {
      v[i++] = f;
    }
  }
  return v;
}

VitalFeatureTable featurize_records(std::span<const VitalRecord> records) {
  VitalFeatureTable table;
  table.features.resize(static_cast<Eigen::Index>(records.size()), kVitalFeatureCount);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto v = featurize_record(records[r]);
    for (std::size_t c = 0; c < kVitalFeatureCount; ++c) {
      table.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[c];
    }
    table.record_ids.push_back(records[r].record_id);
    table.labels.push_back(records[r].label);
  }
  return table;
}

void write_feature_table(std::ostream& out, const VitalFeatureTable& table) {
  out << "record_id,label";
  for (const auto& name : vital_feature_names()) {
    out << ',' << name;
  }
  out << '\n';
  for (std::size_t r = 0; r < table.record_ids.size(); ++r) {
    out << csv::escape(table.record_ids[r]) << ',' << table.labels[r];
    for (Eigen::Index c = 0; c < table.features.cols(); ++c) {
      out << ',' << csv::format_double(table.features(static_cast<Eigen::Index>(r), c));
    }
    out << '\n';
  }
}

VitalFeatureTable read_feature_table(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source);
  std::vector<std::string> header{"record_id", "label"};
  for (const auto& name : vital_feature_names()) {
    header.push_back(name);
  }
  csv::expect_header(reader, header);

  VitalFeatureTable table;
  std::vector<std::array<double, kVitalFeatureCount>> rows;
  csv::Row row;
  while (reader.next(row)) {
    if (row.fields.size() == 1 && row.fields[0].value.empty()) {
      continue;
    }
    if (row.fields.size() != header.size()) {
      throw ParseError(source, row.line, "", "expected " + std::to_string(header.size()) + " fields");
    }
    const std::string& label = row.fields[1].value;
    if (label != "0" && label != "1") {
      throw ParseError(source, row.line, "label", "label must be 0 or 1");
    }
    std::array<double, kVitalFeatureCount> values{};
    for (std::size_t c = 0; c < kVitalFeatureCount; ++c) {
      const auto v = csv::parse_double(row.fields[c + 2].value);
      if (!v) {
        throw ParseError(source, row.line, header[c + 2], "non-numeric value");
      }
      values[c] = *v;
    }
    table.record_ids.push_back(row.fields[0].value);
    table.labels.push_back(label == "1" ? 1 : 0);
    rows.push_back(values);
  }
  table.features.resize(static_cast<Eigen::Index>(rows.size()), kVitalFeatureCount);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < kVitalFeatureCount; ++c) {
      table.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

std::vector<RangeIssue> plausibility_report(std::span<const VitalRecord> records) {
  std::vector<RangeIssue> issues;
  for (const auto& rec : records) {
    for (SignalKind kind : kSignals) {
      const double hi = kind == SignalKind::SpO2 ? 100.0 : 300.0;
      for (double v : series_of(rec, kind)) {
        if (v < 0.0 || v > hi) {
          issues.push_back({rec.record_id, kind, v});
        }
      }
    }
  }
  return issues;
}

} // namespace cpml
