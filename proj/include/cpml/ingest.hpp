#pragma once

#include "cpml/error.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpml {

/// One admission's note. `text` is nullopt when the export had no note text.
struct NoteRecord {
  std::string admission_id;
  std::optional<std::string> text;
  int label = 0;

  bool operator==(const NoteRecord&) const = default;
};

/// One record's three vital-sign series, in file order.
struct VitalRecord {
  std::string record_id;
  int label = 0;
  std::vector<double> heart_rate;
  std::vector<double> spo2;
  std::vector<double> resp_rate;

  bool operator==(const VitalRecord&) const = default;
};

struct LabelSummary {
  std::size_t n_total = 0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  double prevalence = 0.0;

  bool operator==(const LabelSummary&) const = default;
};

// Notes CSV: admission_id,label,text. An unquoted empty text cell is an absent
// note; a quoted empty cell ("") is a present, empty note.
std::vector<NoteRecord> load_notes(const std::filesystem::path& path);
std::vector<NoteRecord> read_notes(std::istream& in, const std::string& source);
void write_notes(std::ostream& out, std::span<const NoteRecord> records);
void save_notes(const std::filesystem::path& path, std::span<const NoteRecord> records);

// Vitals CSV, long format: record_id,label,signal,value with signal in {HR,SPO2,RR}.
// Physiologic range is not checked here; see vital_features.
std::vector<VitalRecord> load_vitals(const std::filesystem::path& path);
std::vector<VitalRecord> read_vitals(std::istream& in, const std::string& source);
void write_vitals(std::ostream& out, std::span<const VitalRecord> records);
void save_vitals(const std::filesystem::path& path, std::span<const VitalRecord> records);

LabelSummary summarize_labels(std::span<const int> labels);
LabelSummary summarize_labels(std::span<const NoteRecord> records);
LabelSummary summarize_labels(std::span<const VitalRecord> records);

} // namespace cpml
