#pragma once

#include "cpml/ingest.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace cpml {

/// Class-conditional generator for one vital signal. Each record draws a
/// baseline from N(mean_c, between_std_c); its samples are baseline plus
/// N(0, within_std) noise. Values are kept in [0, 300] by redrawing.
struct SignalSynth {
  double mean_negative = 0.0;
  double mean_positive = 0.0;
  double between_std_negative = 1.0;
  double between_std_positive = 1.0;
  double within_std = 0.0;
};

struct VitalsSynth {
  SignalSynth heart_rate{82.0, 82.0, 8.0, 8.0, 4.0};
  SignalSynth resp_rate{16.0, 16.0, 2.0, 2.0, 1.5};
  SignalSynth spo2{95.0, 95.0, 1.5, 1.5, 1.0};
  std::size_t min_samples = 16;
  std::size_t max_samples = 16;
};

struct NotesSynth {
  std::size_t vocabulary_size = 5000;
  std::size_t min_length = 60;
  std::size_t max_length = 140;
  std::size_t n_markers = 20;
  /// Positive notes multiply marker-token weights by (1 + marker_boost).
  double marker_boost = 0.0;
  double stop_word_rate = 0.25;
  double zipf_exponent = 1.0;
  double line_break_rate = 0.05;
  double number_rate = 0.02;
  double missing_rate = 0.01;
};

struct SynthConfig {
  std::size_t n_records = 1000;
  double prevalence = 0.25;
  std::uint64_t seed = 0;
  VitalsSynth vitals;
  NotesSynth notes;
};

/// Throws on an invalid configuration.
void validate(const SynthConfig& config);

/// Exactly round(prevalence * n) ones, placed by a seeded shuffle.
std::vector<int> assign_labels(std::size_t n, double prevalence, std::uint64_t seed);

std::vector<VitalRecord> generate_vitals_cohort(const SynthConfig& config, std::uint64_t seed);
std::vector<NoteRecord> generate_notes_corpus(const SynthConfig& config, std::uint64_t seed);

/// Token list the notes generator draws from; markers come first.
std::vector<std::string> synthetic_vocabulary(const NotesSynth& notes);

/// AUC of the single shifted signal's per-record mean, oriented toward the
/// positive class: Phi(|dmu| / sqrt(s0^2 + s1^2)) with s_c the class std of the
/// record mean. Returns 0.5 when no signal is shifted. Throws when more than
/// one signal is shifted or when the record-mean spread is not fixed (within
/// noise with varying sample counts). Ignores the effect of range truncation.
double analytic_auc_target(const SynthConfig& config);

/// Standard normal CDF.
double normal_cdf(double x);

nlohmann::json to_json(const SynthConfig& config);
/// Unknown keys are rejected; missing keys keep their defaults.
SynthConfig synth_config_from_json(const nlohmann::json& doc);

} // namespace cpml
