#pragma once

#include "cpml/ingest.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cpml {

enum class SignalKind { HeartRate, RespRate, SpO2 };

enum class Stage { Normal, Mild, Moderate, Severe, VerySevere, Low, High, Abnormal };

std::string_view to_string(SignalKind kind);
std::string_view to_string(Stage stage);

/// Stages a signal can take, in feature order.
///   HR, SpO2: Normal, Mild, Moderate, Severe, VerySevere
///   RR:       Normal, Low, High, Abnormal
std::span<const Stage> stages_of(SignalKind kind);

/// Staging thresholds. Shared endpoints go to the more severe stage:
///   HR   <90 Normal, [90,100) Mild, [100,110) Moderate, [110,120) Severe, >=120 VerySevere
///   RR   <12 Low, [12,18) Normal, [18,20) High, >=20 Abnormal
///   SpO2 >92 Normal, (90,92] Mild, (85,90] Moderate, (80,85] Severe, <=80 VerySevere
Stage stage_sample(SignalKind kind, double value);

struct SummaryStats {
  double max = 0.0;
  double min = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0; // sample std (n-1), 0 for a single sample
};

SummaryStats summary_stats(std::span<const double> series);

/// Fraction of samples per stage, aligned with stages_of(kind).
std::vector<double> bucket_fractions(SignalKind kind, std::span<const double> series);

inline constexpr std::size_t kVitalFeatureCount = 29;
using VitalFeatureVector = std::array<double, kVitalFeatureCount>;

/// Column names of featurize_record's output, e.g. "hr_max", "rr_frac_low".
/// Order: HR stats, RR stats, SpO2 stats (max, min, mean, median, std each),
/// then HR, RR and SpO2 stage fractions.
const std::array<std::string, kVitalFeatureCount>& vital_feature_names();

VitalFeatureVector featurize_record(const VitalRecord& record);

struct VitalFeatureTable {
  std::vector<std::string> record_ids;
  std::vector<int> labels;
  Eigen::MatrixXd features; // one row per record, columns per vital_feature_names()
};

VitalFeatureTable featurize_records(std::span<const VitalRecord> records);

/// Dense CSV: record_id,label,<feature names...>.
void write_feature_table(std::ostream& out, const VitalFeatureTable& table);
VitalFeatureTable read_feature_table(std::istream& in, const std::string& source);

struct RangeIssue {
  std::string record_id;
  SignalKind signal;
  double value;
};

/// Samples outside plausible physiologic ranges (SpO2 outside [0,100], HR or RR
/// outside [0,300]). Loading accepts these; callers decide what to do.
std::vector<RangeIssue> plausibility_report(std::span<const VitalRecord> records);

} // namespace cpml
