#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace cpml {

struct RocPoint {
  double threshold = 0.0; // scores >= threshold are called positive; +inf for the origin
  double fpr = 0.0;
  double tpr = 0.0;
  std::size_t false_positives = 0;
  std::size_t true_positives = 0;
};

/// Points from (0,0) to (1,1), one per distinct score (descending).
struct RocCurve {
  std::vector<RocPoint> points;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

struct EvalReport {
  std::string model_type;
  double auc = 0.0;
  double accuracy = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::uint64_t seed = 0;
  std::string config_digest;

  bool operator==(const EvalReport&) const = default;
};

/// Sweeps the threshold over every distinct score; tied scores move the curve
/// in one diagonal step. Labels are {0,1}; both classes must be present.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

/// Trapezoidal area under the curve. Evaluated on integer counts, so it equals
/// the Mann-Whitney statistic with ties counted as one half.
double auc(const RocCurve& curve);
double auc(std::span<const double> scores, std::span<const int> labels);

/// Fraction of rows where (score >= threshold) matches the {0,1} label.
double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold = 0.0);

/// ROC CSV with columns threshold,fpr,tpr.
void write_roc_csv(std::ostream& out, const RocCurve& curve);
std::vector<RocPoint> read_roc_csv(std::istream& in, const std::string& source);

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);

/// Writes `<dir>/roc_<model_type>.csv` and `<dir>/summary_<model_type>.json`.
EvalReport emit_report(const std::filesystem::path& dir, const RocCurve& curve, double auc_value,
                       double accuracy_value, const std::string& model_type, std::uint64_t seed,
                       const std::string& config_digest);

/// Writes one JSON object keyed by model_type.
void write_combined_summary(const std::filesystem::path& path, const std::map<std::string, EvalReport>& reports);

} // namespace cpml
