#include "cpml/cli.hpp"

#include "cpml/error.hpp"
#include "cpml/pipeline.hpp"

#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

namespace cpml {

namespace {

struct Overrides {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::string classifier;
  std::string input;
  std::string model_kind;
};

PipelineConfig effective_config(const Overrides& o) {
  PipelineConfig config = o.config_path.empty() ? PipelineConfig{} : load_pipeline_config(o.config_path);
  if (!o.model_kind.empty()) {
    if (o.model_kind != "notes" && o.model_kind != "vitals") {
      throw Error("--model-kind must be notes or vitals");
    }
    config.model_kind = o.model_kind == "notes" ? ModelKind::Notes : ModelKind::Vitals;
  }
  if (!o.seeds.empty()) {
    config.seeds = o.seeds;
    config.synth.seed = o.seeds.front();
  }
  if (!o.out_dir.empty()) {
    config.output_dir = o.out_dir;
  }
  if (!o.classifier.empty()) {
    config.classifier = o.classifier;
  }
  if (!o.input.empty()) {
    config.input = o.input;
  }
  // Round-trip through JSON so overrides get the same validation as the file.
  nlohmann::json doc = to_json(config);
  if (!config.train_fraction) {
    doc.erase("train_fraction");
  }
  return pipeline_config_from_json(doc);
}

void print_table(std::ostream& out, const PipelineConfig& config, const PipelineResult& result) {
  out << "model_kind " << to_string(config.model_kind) << "  config_digest " << result.config_digest.substr(0, 16)
      << '\n';
  for (const auto& run : result.runs) {
    out << "seed " << run.seed << '\n';
    out << "  " << std::left << std::setw(10) << "model" << std::setw(10) << "accuracy" << "auc\n";
    for (const auto& kind : config.classifiers()) {
      const auto& r = run.reports.at(kind);
      out << "  " << std::left << std::setw(10) << kind << std::setw(10) << std::fixed << std::setprecision(3)
          << r.accuracy << std::setprecision(4) << r.auc << '\n';
      out.unsetf(std::ios::fixed);
    }
  }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cpml: COPD prediction from clinical notes and vital signs"};
  app.require_subcommand(1);

  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON pipeline configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seeds, "Seed(s); overrides config seeds and synth.seed");
    sub->add_option("--out", o.out_dir, "Output directory; overrides output_dir");
    sub->add_option("--classifier", o.classifier, "svm | qda | adaboost | all");
    sub->add_option("--input", o.input, "Input CSV; overrides input");
    sub->add_option("--model-kind", o.model_kind, "notes | vitals");
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic notes or vitals CSV");
  auto* featurize = app.add_subcommand("featurize", "Clean/tokenize notes or compute vital features");
  auto* split = app.add_subcommand("split", "Partition and balance, one manifest per seed");
  auto* train = app.add_subcommand("train", "Fit vocabulary, PLS and classifiers on the balanced training set");
  auto* eval = app.add_subcommand("eval", "Score the validation set and write ROC curves and summaries");
  auto* run = app.add_subcommand("run", "featurize, split, train and eval in one go");
  for (auto* sub : {synth, featurize, split, train, eval, run}) {
    add_common(sub);
  }

  std::vector<std::string> argv_store{"cpml"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) {
    argv.push_back(a.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const PipelineConfig config = effective_config(o);
    if (synth->parsed()) {
      run_synth(config);
      out << "wrote " << config.input_path().string() << '\n';
    } else if (featurize->parsed()) {
      run_featurize(config);
    } else if (split->parsed()) {
      run_split(config);
    } else if (train->parsed()) {
      run_train(config);
    } else if (eval->parsed()) {
      print_table(out, config, run_eval(config));
    } else if (run->parsed()) {
      print_table(out, config, run_pipeline(config));
    }
  } catch (const StageError& e) {
    err << "cpml: error " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "cpml: error [config] " << e.what() << '\n';
    return 2;
  }
  return 0;
}

} // namespace cpml
