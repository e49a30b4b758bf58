#pragma once

#include "cpml/classifiers.hpp"
#include "cpml/evaluation.hpp"
#include "cpml/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cpml {

enum class ModelKind { Notes, Vitals };

std::string to_string(ModelKind kind);

struct PipelineConfig {
  ModelKind model_kind = ModelKind::Vitals;
  /// Input CSV. Empty means `<output_dir>/notes.csv` or `<output_dir>/vitals.csv`
  /// as written by the synth stage.
  std::string input;
  /// Unset means 0.5 for notes and 0.7 for vitals.
  std::optional<double> train_fraction;
  std::size_t max_features = 3000;
  std::size_t n_components = 15;
  bool pls_scale = false;
  std::string classifier = "all"; // svm | qda | adaboost | all
  SvmParams svm;
  std::size_t adaboost_rounds = 50;
  double qda_eigen_cutoff = kQdaEigenCutoff;
  double threshold = 0.0;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> stop_words; // added to the built-in list
  std::string output_dir = "cpml_out";
  SynthConfig synth;

  double effective_train_fraction() const;
  std::vector<std::string> classifiers() const;
  std::filesystem::path input_path() const;
};

/// Unknown keys are rejected; missing keys keep their defaults.
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);

/// SHA-256 (hex) of the effective configuration, excluding output_dir.
std::string config_digest(const PipelineConfig& config);

struct SeedReports {
  std::uint64_t seed = 0;
  std::map<std::string, EvalReport> reports; // keyed by model_type
};

struct PipelineResult {
  std::string config_digest;
  std::vector<SeedReports> runs;
};

// Stages. Each reads the previous stage's files from output_dir and throws
// StageError naming the stage on failure. While a stage runs,
// `<output_dir>/INCOMPLETE` exists; it is left behind (with the error) if the
// stage fails.
void run_synth(const PipelineConfig& config);
void run_featurize(const PipelineConfig& config);
void run_split(const PipelineConfig& config);
void run_train(const PipelineConfig& config);
PipelineResult run_eval(const PipelineConfig& config);

/// featurize -> split -> train -> eval.
PipelineResult run_pipeline(const PipelineConfig& config);

nlohmann::json summary_json(const PipelineConfig& config, const PipelineResult& result);

} // namespace cpml
