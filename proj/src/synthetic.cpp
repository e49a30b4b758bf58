#include "cpml/synthetic.hpp"

#include "cpml/error.hpp"
#include "cpml/rng.hpp"
#include "cpml/text_features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace cpml {

namespace {

constexpr double kRangeLow = 0.0;
constexpr double kRangeHigh = 300.0;

const std::array<const char*, 24> kClinicalMarkers{
    "copd",        "wheezing",   "dyspnea",    "emphysema",  "bronchodilator", "nebulizer",
    "albuterol",   "sputum",     "hypoxia",    "exacerbation", "bipap",        "tachypnea",
    "rhonchi",     "ipratropium", "prednisone", "bronchitis", "spirometry",    "hypercapnia",
    "accessory",   "pursed",     "barrel",     "cyanosis",   "tiotropium",     "intubation",
};

const std::array<const char*, 8> kNumberTokens{"88%", "92%", "120/80", "2L", "SpO2", "4L", "37.8", "x3"};

void validate_signal(const SignalSynth& s, const char* name) {
  if (!(s.between_std_negative > 0.0) || !(s.between_std_positive > 0.0) || !(s.within_std >= 0.0)) {
    throw Error(std::string("synth config: ") + name + " stds must be positive (within_std >= 0)");
  }
  for (double m : {s.mean_negative, s.mean_positive}) {
    if (!(m >= kRangeLow && m <= kRangeHigh)) {
      throw Error(std::string("synth config: ") + name + " means must lie in [0, 300]");
    }
  }
}

double truncated_normal(Rng& rng, double mean, double stddev) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double v = rng.normal(mean, stddev);
    if (v >= kRangeLow && v <= kRangeHigh) {
      return v;
    }
  }
  throw Error("synthetic vitals: truncated normal rejection limit reached");
}

std::vector<double> draw_series(Rng& rng, const SignalSynth& s, int label, std::size_t n_samples) {
  const double mean = label == 1 ? s.mean_positive : s.mean_negative;
  const double between = label == 1 ? s.between_std_positive : s.between_std_negative;
  const double baseline = truncated_normal(rng, mean, between);
  std::vector<double> out(n_samples);
  for (auto& v : out) {
    v = s.within_std > 0.0 ? truncated_normal(rng, baseline, s.within_std) : baseline;
  }
  return out;
}

std::string letters(std::size_t index, std::size_t width) {
  std::string s(width, 'a');
  for (std::size_t k = width; k-- > 0;) {
    s[k] = static_cast<char>('a' + index % 26);
    index /= 26;
  }
  return s;
}

std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> c(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    c[i] = acc;
  }
  return c;
}

std::size_t draw_index(Rng& rng, const std::vector<double>& cum) {
  const double u = rng.uniform01() * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

} // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void validate(const SynthConfig& config) {
  if (config.n_records < 2) {
    throw Error("synth config: n_records must be >= 2");
  }
  if (!(config.prevalence > 0.0 && config.prevalence < 1.0)) {
    throw Error("synth config: prevalence must lie in (0, 1)");
  }
  const auto n_pos = static_cast<std::size_t>(std::llround(config.prevalence * static_cast<double>(config.n_records)));
  if (n_pos == 0 || n_pos == config.n_records) {
    throw Error("synth config: prevalence leaves one class empty");
  }
  validate_signal(config.vitals.heart_rate, "heart_rate");
  validate_signal(config.vitals.resp_rate, "resp_rate");
  validate_signal(config.vitals.spo2, "spo2");
  if (config.vitals.min_samples < 1 || config.vitals.max_samples < config.vitals.min_samples) {
    throw Error("synth config: need 1 <= min_samples <= max_samples");
  }
  const NotesSynth& n = config.notes;
  if (n.vocabulary_size < 2 || n.vocabulary_size > 26 * 26 * 26 + kClinicalMarkers.size()) {
    throw Error("synth config: vocabulary_size out of range");
  }
  if (n.n_markers > n.vocabulary_size) {
    throw Error("synth config: n_markers exceeds vocabulary_size");
  }
  if (n.min_length < 1 || n.max_length < n.min_length) {
    throw Error("synth config: need 1 <= min_length <= max_length");
  }
  if (!(n.marker_boost >= 0.0) || !(n.zipf_exponent >= 0.0)) {
    throw Error("synth config: marker_boost and zipf_exponent must be >= 0");
  }
  for (double rate : {n.stop_word_rate, n.line_break_rate, n.number_rate, n.missing_rate}) {
    if (!(rate >= 0.0 && rate < 1.0)) {
      throw Error("synth config: rates must lie in [0, 1)");
    }
  }
}

std::vector<int> assign_labels(std::size_t n, double prevalence, std::uint64_t seed) {
  const auto n_pos = static_cast<std::size_t>(std::llround(prevalence * static_cast<double>(n)));
  std::vector<int> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(std::min(n_pos, n)), 1);
  Rng rng(derive_seed(seed, 0));
  rng.shuffle(labels);
  return labels;
}

std::vector<VitalRecord> generate_vitals_cohort(const SynthConfig& config, std::uint64_t seed) {
  validate(config);
  const auto labels = assign_labels(config.n_records, config.prevalence, seed);
  const VitalsSynth& v = config.vitals;
  std::vector<VitalRecord> out;
  out.reserve(config.n_records);
  for (std::size_t i = 0; i < config.n_records; ++i) {
    Rng rng(derive_seed(seed, i + 1));
    VitalRecord rec;
    rec.record_id = "v" + std::to_string(100000 + i);
    rec.label = labels[i];
    const std::size_t m = v.min_samples + static_cast<std::size_t>(rng.below(v.max_samples - v.min_samples + 1));
    rec.heart_rate = draw_series(rng, v.heart_rate, rec.label, m);
    rec.resp_rate = draw_series(rng, v.resp_rate, rec.label, m);
    rec.spo2 = draw_series(rng, v.spo2, rec.label, m);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::string> synthetic_vocabulary(const NotesSynth& notes) {
  std::vector<std::string> terms;
  terms.reserve(notes.vocabulary_size);
  std::set<std::string> used;
  for (std::size_t k = 0; k < notes.n_markers; ++k) {
    std::string t = k < kClinicalMarkers.size() ? kClinicalMarkers[k] : "mk" + letters(k, 3);
    used.insert(t);
    terms.push_back(std::move(t));
  }
  // Filler terms "qaaa", "qaab", ...: no English stop word starts with 'q'.
  for (std::size_t k = 0; terms.size() < notes.vocabulary_size; ++k) {
    std::string t = "q" + letters(k, 3);
    if (used.insert(t).second) {
      terms.push_back(std::move(t));
    }
  }
  return terms;
}

std::vector<NoteRecord> generate_notes_corpus(const SynthConfig& config, std::uint64_t seed) {
  validate(config);
  const NotesSynth& ns = config.notes;
  const auto labels = assign_labels(config.n_records, config.prevalence, seed);
  const auto terms = synthetic_vocabulary(ns);

  std::vector<double> base(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    base[i] = 1.0 / std::pow(static_cast<double>(i + 1), ns.zipf_exponent);
  }
  std::vector<double> boosted = base;
  for (std::size_t i = 0; i < ns.n_markers; ++i) {
    boosted[i] *= 1.0 + ns.marker_boost;
  }
  const auto cum_negative = cumulative(base);
  const auto cum_positive = cumulative(boosted);

  const StopWordList english = StopWordList::english();
  const auto& stop_list = english.terms();
  const std::vector<std::string> stop_words(stop_list.begin(), stop_list.end());

  std::vector<NoteRecord> out;
  out.reserve(config.n_records);
  for (std::size_t i = 0; i < config.n_records; ++i) {
    Rng rng(derive_seed(seed, i + 1));
    NoteRecord rec;
    rec.admission_id = "h" + std::to_string(100000 + i);
    rec.label = labels[i];
    if (rng.uniform01() < ns.missing_rate) {
      out.push_back(std::move(rec));
      continue;
    }
    const auto& cum = rec.label == 1 ? cum_positive : cum_negative;
    const std::size_t length = ns.min_length + static_cast<std::size_t>(rng.below(ns.max_length - ns.min_length + 1));
    std::string text;
    for (std::size_t k = 0; k < length; ++k) {
      if (k > 0) {
        const double u = rng.uniform01();
        text += u < ns.line_break_rate ? (u < 0.5 * ns.line_break_rate ? "\r\n" : "\n") : " ";
      }
      std::string token;
      const double kind = rng.uniform01();
      if (kind < ns.stop_word_rate) {
        token = stop_words[static_cast<std::size_t>(rng.below(stop_words.size()))];
      } else if (kind < ns.stop_word_rate + ns.number_rate) {
        token = kNumberTokens[static_cast<std::size_t>(rng.below(kNumberTokens.size()))];
      } else {
        token = terms[draw_index(rng, cum)];
      }
      if (rng.uniform01() < 0.1) {
        token[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
      }
      text += token;
      if (rng.uniform01() < 0.05) {
        text += rng.uniform01() < 0.5 ? "," : ".";
      }
    }
    rec.text = std::move(text);
    out.push_back(std::move(rec));
  }
  return out;
}

double analytic_auc_target(const SynthConfig& config) {
  validate(config);
  const VitalsSynth& v = config.vitals;
  const SignalSynth* shifted = nullptr;
  for (const SignalSynth* s : {&v.heart_rate, &v.resp_rate, &v.spo2}) {
    if (s->mean_positive != s->mean_negative) {
      if (shifted) {
        throw Error("analytic_auc_target: more than one signal is shifted");
      }
      shifted = s;
    }
  }
  if (!shifted) {
    return 0.5;
  }
  if (shifted->within_std > 0.0 && v.min_samples != v.max_samples) {
    throw Error("analytic_auc_target: record-mean spread varies with sample count");
  }
  const double within_var = shifted->within_std * shifted->within_std / static_cast<double>(v.min_samples);
  const double var0 = shifted->between_std_negative * shifted->between_std_negative + within_var;
  const double var1 = shifted->between_std_positive * shifted->between_std_positive + within_var;
  const double delta = std::abs(shifted->mean_positive - shifted->mean_negative);
  return normal_cdf(delta / std::sqrt(var0 + var1));
}

namespace {

void reject_unknown(const nlohmann::json& doc, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!doc.is_object()) {
    throw Error("synth config: '" + where + "' must be an object");
  }
  for (const auto& item : doc.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; }) ==
        allowed.end()) {
      throw Error("synth config: unknown key '" + where + "." + item.key() + "'");
    }
  }
}

template <typename T>
void read_opt(const nlohmann::json& doc, const char* key, T& slot) {
  if (doc.contains(key)) {
    slot = doc.at(key).get<T>();
  }
}

nlohmann::json signal_to_json(const SignalSynth& s) {
  return {{"mean_negative", s.mean_negative},
          {"mean_positive", s.mean_positive},
          {"between_std_negative", s.between_std_negative},
          {"between_std_positive", s.between_std_positive},
          {"within_std", s.within_std}};
}

SignalSynth signal_from_json(const nlohmann::json& doc, SignalSynth s, const std::string& where) {
  reject_unknown(doc, {"mean_negative", "mean_positive", "between_std_negative", "between_std_positive", "within_std"},
                 where);
  read_opt(doc, "mean_negative", s.mean_negative);
  read_opt(doc, "mean_positive", s.mean_positive);
  read_opt(doc, "between_std_negative", s.between_std_negative);
  read_opt(doc, "between_std_positive", s.between_std_positive);
  read_opt(doc, "within_std", s.within_std);
  return s;
}

} // namespace

nlohmann::json to_json(const SynthConfig& c) {
  return {
      {"n_records", c.n_records},
      {"prevalence", c.prevalence},
      {"seed", c.seed},
      {"vitals",
       {{"heart_rate", signal_to_json(c.vitals.heart_rate)},
        {"resp_rate", signal_to_json(c.vitals.resp_rate)},
        {"spo2", signal_to_json(c.vitals.spo2)},
        {"min_samples", c.vitals.min_samples},
        {"max_samples", c.vitals.max_samples}}},
      {"notes",
       {{"vocabulary_size", c.notes.vocabulary_size},
        {"min_length", c.notes.min_length},
        {"max_length", c.notes.max_length},
        {"n_markers", c.notes.n_markers},
        {"marker_boost", c.notes.marker_boost},
        {"stop_word_rate", c.notes.stop_word_rate},
        {"zipf_exponent", c.notes.zipf_exponent},
        {"line_break_rate", c.notes.line_break_rate},
        {"number_rate", c.notes.number_rate},
        {"missing_rate", c.notes.missing_rate}}},
  };
}

SynthConfig synth_config_from_json(const nlohmann::json& doc) {
  SynthConfig c;
  reject_unknown(doc, {"n_records", "prevalence", "seed", "vitals", "notes"}, "synth");
  read_opt(doc, "n_records", c.n_records);
  read_opt(doc, "prevalence", c.prevalence);
  read_opt(doc, "seed", c.seed);
  if (doc.contains("vitals")) {
    const auto& v = doc.at("vitals");
    reject_unknown(v, {"heart_rate", "resp_rate", "spo2", "min_samples", "max_samples"}, "synth.vitals");
    if (v.contains("heart_rate")) c.vitals.heart_rate = signal_from_json(v.at("heart_rate"), c.vitals.heart_rate, "synth.vitals.heart_rate");
    if (v.contains("resp_rate")) c.vitals.resp_rate = signal_from_json(v.at("resp_rate"), c.vitals.resp_rate, "synth.vitals.resp_rate");
    if (v.contains("spo2")) c.vitals.spo2 = signal_from_json(v.at("spo2"), c.vitals.spo2, "synth.vitals.spo2");
    read_opt(v, "min_samples", c.vitals.min_samples);
    read_opt(v, "max_samples", c.vitals.max_samples);
  }
  if (doc.contains("notes")) {
    const auto& n = doc.at("notes");
    reject_unknown(n, {"vocabulary_size", "min_length", "max_length", "n_markers", "marker_boost", "stop_word_rate",
                       "zipf_exponent", "line_break_rate", "number_rate", "missing_rate"},
                   "synth.notes");
    read_opt(n, "vocabulary_size", c.notes.vocabulary_size);
    read_opt(n, "min_length", c.notes.min_length);
    read_opt(n, "max_length", c.notes.max_length);
    read_opt(n, "n_markers", c.notes.n_markers);
    read_opt(n, "marker_boost", c.notes.marker_boost);
    read_opt(n, "stop_word_rate", c.notes.stop_word_rate);
    read_opt(n, "zipf_exponent", c.notes.zipf_exponent);
    read_opt(n, "line_break_rate", c.notes.line_break_rate);
    read_opt(n, "number_rate", c.notes.number_rate);
    read_opt(n, "missing_rate", c.notes.missing_rate);
  }
  validate(c);
  return c;
}

} // namespace cpml
