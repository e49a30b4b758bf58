#include "cpml/ingest.hpp"

#include "cpml/csv.hpp"

#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace cpml {

namespace {

const std::vector<std::string> kNoteHeader{"admission_id", "label", "text"};
const std::vector<std::string> kVitalHeader{"record_id", "label", "signal", "value"};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path.string() + "' for reading");
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

bool is_blank(const csv::Row& row) {
  return row.fields.size() == 1 && row.fields[0].value.empty() && !row.fields[0].quoted;
}

int parse_label(const csv::Reader& reader, const csv::Row& row, const csv::Field& field) {
  if (field.value == "0") {
    return 0;
  }
  if (field.value == "1") {
    return 1;
  }
  throw ParseError(reader.source(), row.line, "label", "label must be 0 or 1, got '" + field.value + "'");
}

void check_arity(const csv::Reader& reader, const csv::Row& row, std::size_t expected) {
  if (row.fields.size() != expected) {
    throw ParseError(reader.source(), row.line, "",
                     "expected " + std::to_string(expected) + " fields, got " +
                         std::to_string(row.fields.size()));
  }
}

} // namespace

std::vector<NoteRecord> read_notes(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source);
  csv::expect_header(reader, kNoteHeader);

  std::vector<NoteRecord> records;
  std::unordered_set<std::string> seen;
  csv::Row row;
  while (reader.next(row)) {
    if (is_blank(row)) {
      continue;
    }
    check_arity(reader, row, kNoteHeader.size());
    NoteRecord rec;
    rec.admission_id = row.fields[0].value;
    if (rec.admission_id.empty()) {
      throw ParseError(source, row.line, "admission_id", "empty admission_id");
    }
    if (!seen.insert(rec.admission_id).second) {
      throw ParseError(source, row.line, "admission_id", "duplicate admission_id '" + rec.admission_id + "'");
    }
    rec.label = parse_label(reader, row, row.fields[1]);
    const csv::Field& text = row.fields[2];
    if (!text.value.empty() || text.quoted) {
      rec.text = text.value;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<NoteRecord> load_notes(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_notes(in, path.string());
}

void write_notes(std::ostream& out, std::span<const NoteRecord> records) {
  out << "admission_id,label,text\n";
  for (const auto& rec : records) {
    out << csv::escape(rec.admission_id) << ',' << rec.label << ',';
    if (rec.text) {
      out << csv::escape(*rec.text, true);
    }
    out << '\n';
  }
}

void save_notes(const std::filesystem::path& path, std::span<const NoteRecord> records) {
  auto out = open_output(path);
  write_notes(out, records);
}

std::vector<VitalRecord> read_vitals(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source);
  csv::expect_header(reader, kVitalHeader);

  std::vector<VitalRecord> records;
  std::unordered_map<std::string, std::size_t> index;
  csv::Row row;
  while (reader.next(row)) {
    if (is_blank(row)) {
      continue;
    }
    check_arity(reader, row, kVitalHeader.size());
    const std::string& id = row.fields[0].value;
    if (id.empty()) {
      throw ParseError(source, row.line, "record_id", "empty record_id");
    }
    const int label = parse_label(reader, row, row.fields[1]);
    const auto value = csv::parse_double(row.fields[3].value);
    if (!value) {
      throw ParseError(source, row.line, "value", "non-numeric value '" + row.fields[3].value + "'");
    }
    if (!std::isfinite(*value)) {
      throw ParseError(source, row.line, "value", "non-finite value '" + row.fields[3].value + "'");
    }

    auto [it, inserted] = index.try_emplace(id, records.size());
    if (inserted) {
      records.push_back(VitalRecord{id, label, {}, {}, {}});
    }
    VitalRecord& rec = records[it->second];
    if (rec.label != label) {
      throw ParseError(source, row.line, "label", "label of record '" + id + "' changes between rows");
    }

    const std::string& signal = row.fields[2].value;
    if (signal == "HR") {
      rec.heart_rate.push_back(*value);
    } else if (signal == "SPO2") {
      rec.spo2.push_back(*value);
    } else if (signal == "RR") {
      rec.resp_rate.push_back(*value);
    } else {
      throw ParseError(source, row.line, "signal", "unknown signal '" + signal + "'");
    }
  }

  for (const auto& rec : records) {
    const char* missing = rec.heart_rate.empty() ? "HR"
                          : rec.spo2.empty()     ? "SPO2"
                          : rec.resp_rate.empty() ? "RR"
                                                 : nullptr;
    if (missing) {
      throw Error(source + ": record '" + rec.record_id + "' has an empty " + missing + " series");
    }
  }
  return records;
}

std::vector<VitalRecord> load_vitals(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_vitals(in, path.string());
}

void write_vitals(std::ostream& out, std::span<const VitalRecord> records) {
  out << "record_id,label,signal,value\n";
  for (const auto& rec : records) {
    const std::string id = csv::escape(rec.record_id);
    auto emit = [&](const char* signal, const std::vector<double>& series) {
      for (double v : series) {
        out << id << ',' << rec.label << ',' << signal << ',' << csv::format_double(v) << '\n';
      }
    };
    emit("HR", rec.heart_rate);
    emit("SPO2", rec.spo2);
    emit("RR", rec.resp_rate);
  }
}

void save_vitals(const std::filesystem::path& path, std::span<const VitalRecord> records) {
  auto out = open_output(path);
  write_vitals(out, records);
}

LabelSummary summarize_labels(std::span<const int> labels) {
  if (labels.empty()) {
    throw Error("summarize_labels: empty record list");
  }
  LabelSummary s;
  s.n_total = labels.size();
  for (int label : labels) {
    if (label != 0 && label != 1) {
      throw Error("summarize_labels: label must be 0 or 1");
    }
    s.n_positive += static_cast<std::size_t>(label);
  }
  s.n_negative = s.n_total - s.n_positive;
  s.prevalence = static_cast<double>(s.n_positive) / static_cast<double>(s.n_total);
  return s;
}

namespace {
template <typename Record>
LabelSummary summarize_records(std::span<const Record> records) {
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const auto& r : records) {
    labels.push_back(r.label);
  }
  return summarize_labels(std::span<const int>(labels));
}
} // namespace

LabelSummary summarize_labels(std::span<const NoteRecord> records) { return summarize_records(records); }
LabelSummary summarize_labels(std::span<const VitalRecord> records) { return summarize_records(records); }

} // namespace cpml
