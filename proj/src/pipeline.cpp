#include "cpml/pipeline.hpp"

#include "cpml/csv.hpp"
#include "cpml/error.hpp"
#include "cpml/ingest.hpp"
#include "cpml/partitioning.hpp"
#include "cpml/pls.hpp"
#include "cpml/rng.hpp"
#include "cpml/text_features.hpp"
#include "cpml/vital_features.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <openssl/evp.h>

namespace fs = std::filesystem;

namespace cpml {

namespace {

constexpr const char* kFeaturesFile = "features.csv";
constexpr const char* kTokensFile = "tokens.csv";
constexpr const char* kSplitFile = "split.csv";
constexpr const char* kVocabularyFile = "vocabulary.txt";
constexpr const char* kPlsFile = "pls.json";
constexpr const char* kIncompleteFile = "INCOMPLETE";

// ---------------------------------------------------------------------------
// Small file helpers

std::ifstream open_existing(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error("missing upstream artifact '" + path.string() + "'");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path.string() + "'");
  }
  return in;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  body(out);
  out.flush();
  if (!out) {
    throw Error("failed writing '" + path.string() + "'");
  }
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  write_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

nlohmann::json read_json(const fs::path& path) {
  auto in = open_existing(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": invalid JSON: " + e.what());
  }
}

fs::path seed_dir(const PipelineConfig& config, std::uint64_t seed) {
  return fs::path(config.output_dir) / ("seed_" + std::to_string(seed));
}

// Runs `body` as a named stage: INCOMPLETE marker while running, StageError on failure.
template <typename F>
auto stage(const PipelineConfig& config, const std::string& name, F&& body) {
  const fs::path out(config.output_dir);
  const fs::path marker = out / kIncompleteFile;
  try {
    fs::create_directories(out);
    write_file(marker, [&](std::ostream& o) { o << name << " running\n"; });
    write_json(out / "config.json", [&] {
      auto doc = to_json(config);
      doc["config_digest"] = config_digest(config);
      return doc;
    }());
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      fs::remove(marker);
    } else {
      auto result = body();
      fs::remove(marker);
      return result;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    std::ofstream(marker, std::ios::binary) << name << " failed: " << e.what() << '\n';
    throw StageError(name, e.what());
  }
}

// ---------------------------------------------------------------------------
// Token corpus file (notes featurization output): admission_id,label,tokens

struct TokenCorpus {
  std::vector<std::string> ids;
  std::vector<int> labels;
  std::vector<TokenList> docs;
};

void write_token_corpus(std::ostream& out, const TokenCorpus& corpus) {
  out << "admission_id,label,tokens\n";
  for (std::size_t i = 0; i < corpus.ids.size(); ++i) {
    std::string joined;
    for (const auto& t : corpus.docs[i]) {
      if (!joined.empty()) {
        joined.push_back(' ');
      }
      joined += t;
    }
    out << csv::escape(corpus.ids[i]) << ',' << corpus.labels[i] << ',' << joined << '\n';
  }
}

TokenCorpus read_token_corpus(const fs::path& path) {
  auto in = open_existing(path);
  csv::Reader reader(in, path.string());
  csv::expect_header(reader, {"admission_id", "label", "tokens"});
  TokenCorpus corpus;
  csv::Row row;
  while (reader.next(row)) {
    if (row.fields.size() != 3) {
      throw ParseError(path.string(), row.line, "", "expected 3 fields");
    }
    const std::string& label = row.fields[1].value;
    if (label != "0" && label != "1") {
      throw ParseError(path.string(), row.line, "label", "label must be 0 or 1");
    }
    corpus.ids.push_back(row.fields[0].value);
    corpus.labels.push_back(label == "1" ? 1 : 0);
    TokenList tokens;
    std::istringstream words(row.fields[2].value);
    for (std::string w; words >> w;) {
      tokens.push_back(w);
    }
    corpus.docs.push_back(std::move(tokens));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Featurized dataset in a kind-independent form.

struct Dataset {
  std::vector<std::string> ids;
  std::vector<int> labels;
  // exactly one of these is populated
  std::optional<Eigen::MatrixXd> dense;
  std::optional<TokenCorpus> tokens;
};

Dataset load_dataset(const PipelineConfig& config) {
  const fs::path out(config.output_dir);
  Dataset ds;
  if (config.model_kind == ModelKind::Vitals) {
    auto in = open_existing(out / kFeaturesFile);
    auto table = read_feature_table(in, (out / kFeaturesFile).string());
    ds.ids = std::move(table.record_ids);
    ds.labels = std::move(table.labels);
    ds.dense = std::move(table.features);
  } else {
    auto corpus = read_token_corpus(out / kTokensFile);
    ds.ids = corpus.ids;
    ds.labels = corpus.labels;
    ds.tokens = std::move(corpus);
  }
  return ds;
}

std::vector<std::size_t> rows_for(const std::vector<std::string>& wanted, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    index.emplace(ids[i], i);
  }
  std::vector<std::size_t> rows;
  rows.reserve(wanted.size());
  for (const auto& id : wanted) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw Error("split references unknown id '" + id + "'");
    }
    rows.push_back(it->second);
  }
  return rows;
}

BalancedSplit load_split(const PipelineConfig& config, std::uint64_t seed) {
  const fs::path path = seed_dir(config, seed) / kSplitFile;
  auto in = open_existing(path);
  return read_manifest(in, path.string());
}

std::vector<int> pick(const std::vector<int>& labels, const std::vector<std::size_t>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) {
    out.push_back(labels[r]);
  }
  return out;
}

Eigen::MatrixXd dense_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

StopWordList stop_words_for(const PipelineConfig& config) {
  StopWordList stop = StopWordList::english();
  stop.extend(config.stop_words);
  return stop;
}

// Builds the feature matrix for `rows`. Notes use the vocabulary saved by train.
Eigen::MatrixXd feature_rows(const Dataset& ds, const std::vector<std::size_t>& rows, const Vocabulary* vocab) {
  if (ds.dense) {
    return dense_rows(*ds.dense, rows);
  }
  std::vector<TokenList> docs;
  docs.reserve(rows.size());
  for (auto r : rows) {
    docs.push_back(ds.tokens->docs[r]);
  }
  return vectorize(docs, *vocab).to_dense();
}

PlsModel fit_pls_capped(const Eigen::MatrixXd& x, const std::vector<int>& labels01, const PipelineConfig& config) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels01.size()));
  for (std::size_t i = 0; i < labels01.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = labels01[i];
  }
  const std::size_t bound = std::min<std::size_t>(static_cast<std::size_t>(x.rows()) - 1, static_cast<std::size_t>(x.cols()));
  std::size_t k = std::min(config.n_components, bound);
  try {
    return fit_pls(x, y, k, config.pls_scale);
  } catch (const PlsRankError& e) {
    if (e.achievable() == 0) {
      throw;
    }
    return fit_pls(x, y, e.achievable(), config.pls_scale);
  }
}

void stamp(nlohmann::json& doc, const std::string& digest, std::uint64_t seed) {
  doc["config_digest"] = digest;
  doc["seed"] = seed;
}

} // namespace

// ---------------------------------------------------------------------------

std::string to_string(ModelKind kind) { return kind == ModelKind::Notes ? "notes" : "vitals"; }

double PipelineConfig::effective_train_fraction() const {
  return train_fraction.value_or(model_kind == ModelKind::Notes ? 0.5 : 0.7);
}

std::vector<std::string> PipelineConfig::classifiers() const {
  if (classifier == "all") {
    return {"svm", "adaboost", "qda"};
  }
  return {classifier};
}

fs::path PipelineConfig::input_path() const {
  if (!input.empty()) {
    return input;
  }
  return fs::path(output_dir) / (model_kind == ModelKind::Notes ? "notes.csv" : "vitals.csv");
}

namespace {

void reject_unknown(const nlohmann::json& doc, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!doc.is_object()) {
    throw Error("config: '" + where + "' must be an object");
  }
  for (const auto& item : doc.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; })) {
      throw Error("config: unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
    }
  }
}

template <typename T>
void read_opt(const nlohmann::json& doc, const char* key, T& slot) {
  if (doc.contains(key)) {
    slot = doc.at(key).get<T>();
  }
}

} // namespace

PipelineConfig pipeline_config_from_json(const nlohmann::json& doc) {
  PipelineConfig c;
  try {
    reject_unknown(doc,
                   {"model_kind", "input", "train_fraction", "max_features", "n_components", "pls_scale", "classifier",
                    "svm", "adaboost", "qda", "threshold", "seeds", "stop_words", "output_dir", "synth"},
                   "");
    if (doc.contains("model_kind")) {
      const auto kind = doc.at("model_kind").get<std::string>();
      if (kind == "notes") {
        c.model_kind = ModelKind::Notes;
      } else if (kind == "vitals") {
        c.model_kind = ModelKind::Vitals;
      } else {
        throw Error("config: model_kind must be 'notes' or 'vitals'");
      }
    }
    read_opt(doc, "input", c.input);
    if (doc.contains("train_fraction") && !doc.at("train_fraction").is_null()) {
      c.train_fraction = doc.at("train_fraction").get<double>();
    }
    read_opt(doc, "max_features", c.max_features);
    read_opt(doc, "n_components", c.n_components);
    read_opt(doc, "pls_scale", c.pls_scale);
    read_opt(doc, "classifier", c.classifier);
    if (doc.contains("svm")) {
      const auto& s = doc.at("svm");
      reject_unknown(s, {"C", "gamma", "tol", "max_iterations"}, "svm");
      read_opt(s, "C", c.svm.C);
      if (s.contains("gamma") && !s.at("gamma").is_null()) {
        c.svm.gamma = s.at("gamma").get<double>();
      }
      read_opt(s, "tol", c.svm.tol);
      read_opt(s, "max_iterations", c.svm.max_iterations);
    }
    if (doc.contains("adaboost")) {
      reject_unknown(doc.at("adaboost"), {"n_rounds"}, "adaboost");
      read_opt(doc.at("adaboost"), "n_rounds", c.adaboost_rounds);
    }
    if (doc.contains("qda")) {
      reject_unknown(doc.at("qda"), {"eigen_cutoff"}, "qda");
      read_opt(doc.at("qda"), "eigen_cutoff", c.qda_eigen_cutoff);
    }
    read_opt(doc, "threshold", c.threshold);
    read_opt(doc, "seeds", c.seeds);
    read_opt(doc, "stop_words", c.stop_words);
    read_opt(doc, "output_dir", c.output_dir);
    if (doc.contains("synth")) {
      c.synth = synth_config_from_json(doc.at("synth"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }

  if (c.train_fraction && !(*c.train_fraction > 0.0 && *c.train_fraction < 1.0)) {
    throw Error("config: train_fraction must lie in (0, 1)");
  }
  if (c.max_features < 1 || c.n_components < 1) {
    throw Error("config: max_features and n_components must be >= 1");
  }
  if (c.classifier != "svm" && c.classifier != "qda" && c.classifier != "adaboost" && c.classifier != "all") {
    throw Error("config: classifier must be svm, qda, adaboost or all");
  }
  if (c.seeds.empty()) {
    throw Error("config: seeds must not be empty");
  }
  if (c.adaboost_rounds < 1) {
    throw Error("config: adaboost.n_rounds must be >= 1");
  }
  StopWordList(c.stop_words); // validates entries
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  return pipeline_config_from_json(read_json(path));
}

nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json doc;
  doc["model_kind"] = to_string(c.model_kind);
  doc["input"] = c.input;
  doc["train_fraction"] = c.effective_train_fraction();
  doc["max_features"] = c.max_features;
  doc["n_components"] = c.n_components;
  doc["pls_scale"] = c.pls_scale;
  doc["classifier"] = c.classifier;
  doc["svm"] = {{"C", c.svm.C},
                {"gamma", c.svm.gamma ? nlohmann::json(*c.svm.gamma) : nlohmann::json(nullptr)},
                {"tol", c.svm.tol},
                {"max_iterations", c.svm.max_iterations}};
  doc["adaboost"] = {{"n_rounds", c.adaboost_rounds}};
  doc["qda"] = {{"eigen_cutoff", c.qda_eigen_cutoff}};
  doc["threshold"] = c.threshold;
  doc["seeds"] = c.seeds;
  doc["stop_words"] = c.stop_words;
  doc["output_dir"] = c.output_dir;
  doc["synth"] = to_json(c.synth);
  return doc;
}

std::string config_digest(const PipelineConfig& config) {
  auto doc = to_json(config);
  doc.erase("output_dir");
  const std::string text = doc.dump();

  unsigned char hash[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), hash, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("config_digest: SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[hash[i] >> 4]);
    out.push_back(hex[hash[i] & 0xF]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stages

void run_synth(const PipelineConfig& config) {
  stage(config, "synth", [&] {
    const fs::path path = fs::path(config.output_dir) /
                          (config.model_kind == ModelKind::Notes ? "notes.csv" : "vitals.csv");
    if (config.model_kind == ModelKind::Notes) {
      save_notes(path, generate_notes_corpus(config.synth, config.synth.seed));
    } else {
      save_vitals(path, generate_vitals_cohort(config.synth, config.synth.seed));
    }
  });
}

void run_featurize(const PipelineConfig& config) {
  stage(config, "featurize", [&] {
    const fs::path out(config.output_dir);
    const fs::path input = config.input_path();
    if (!fs::exists(input)) {
      throw Error("missing upstream artifact '" + input.string() + "'");
    }
    if (config.model_kind == ModelKind::Vitals) {
      const auto records = load_vitals(input);
      const auto table = featurize_records(records);
      write_file(out / kFeaturesFile, [&](std::ostream& o) { write_feature_table(o, table); });
    } else {
      const auto notes = load_notes(input);
      TokenCorpus corpus;
      for (const auto& n : notes) {
        corpus.ids.push_back(n.admission_id);
        corpus.labels.push_back(n.label);
        corpus.docs.push_back(tokenize(clean_text(n.text)));
      }
      write_file(out / kTokensFile, [&](std::ostream& o) { write_token_corpus(o, corpus); });
    }
  });
}

void run_split(const PipelineConfig& config) {
  stage(config, "split", [&] {
    const Dataset ds = load_dataset(config);
    std::vector<LabeledKey> keys;
    std::unordered_map<std::string, int> labels;
    for (std::size_t i = 0; i < ds.ids.size(); ++i) {
      keys.push_back({ds.ids[i], ds.labels[i]});
      labels.emplace(ds.ids[i], ds.labels[i]);
    }
    for (std::uint64_t seed : config.seeds) {
      const Split s = split(keys, config.effective_train_fraction(), seed);
      const BalancedSplit balanced = balance_training(s, labels, derive_seed(seed, 1));
      fs::create_directories(seed_dir(config, seed));
      write_file(seed_dir(config, seed) / kSplitFile, [&](std::ostream& o) { write_manifest(o, balanced); });
    }
  });
}

void run_train(const PipelineConfig& config) {
  stage(config, "train", [&] {
    const std::string digest = config_digest(config);
    const Dataset ds = load_dataset(config);
    for (std::uint64_t seed : config.seeds) {
      const fs::path dir = seed_dir(config, seed);
      const BalancedSplit sp = load_split(config, seed);
      const auto train_rows = rows_for(sp.train_ids, ds.ids);
      const auto train_labels = pick(ds.labels, train_rows);

      std::optional<Vocabulary> vocab;
      if (ds.tokens) {
        std::vector<TokenList> train_docs;
        for (auto r : train_rows) {
          train_docs.push_back(ds.tokens->docs[r]);
        }
        vocab = build_vocabulary(train_docs, stop_words_for(config), config.max_features);
        vocab->save(dir / kVocabularyFile);
        const auto histogram = term_histogram(train_docs);
        write_file(dir / "term_histogram.csv", [&](std::ostream& o) { write_histogram(o, histogram); });
        const auto dtm = vectorize(ds.tokens->docs, *vocab, ds.ids);
        write_file(dir / "dtm.csv", [&](std::ostream& o) { dtm.write_triplets(o); });
      }

      const Eigen::MatrixXd x_train = feature_rows(ds, train_rows, vocab ? &*vocab : nullptr);
      const PlsModel pls = fit_pls_capped(x_train, train_labels, config);
      auto pls_doc = to_json(pls);
      stamp(pls_doc, digest, seed);
      write_json(dir / kPlsFile, pls_doc);

      const Eigen::MatrixXd scores = transform(pls, x_train);
      const auto y = to_signed_labels(train_labels);
      for (const auto& kind : config.classifiers()) {
        TrainedClassifier model;
        if (kind == "svm") {
          model = train_svm(scores, y, config.svm);
        } else if (kind == "adaboost") {
          model = train_adaboost(scores, y, config.adaboost_rounds);
        } else {
          model = train_qda(scores, y, config.qda_eigen_cutoff);
        }
        auto doc = to_json(model);
        stamp(doc, digest, seed);
        write_json(dir / ("model_" + kind + ".json"), doc);
      }
    }
  });
}

PipelineResult run_eval(const PipelineConfig& config) {
  auto result = stage(config, "eval", [&] {
    PipelineResult result;
    result.config_digest = config_digest(config);
    const Dataset ds = load_dataset(config);
    for (std::uint64_t seed : config.seeds) {
      const fs::path dir = seed_dir(config, seed);
      const BalancedSplit sp = load_split(config, seed);
      const auto val_rows = rows_for(sp.validation_ids, ds.ids);
      const auto val_labels = pick(ds.labels, val_rows);

      std::optional<Vocabulary> vocab;
      if (ds.tokens) {
        vocab = Vocabulary::load(dir / kVocabularyFile);
      }
      const PlsModel pls = pls_from_json(read_json(dir / kPlsFile));
      const Eigen::MatrixXd scores = transform(pls, feature_rows(ds, val_rows, vocab ? &*vocab : nullptr));

      SeedReports run;
      run.seed = seed;
      for (const auto& kind : config.classifiers()) {
        const TrainedClassifier model = classifier_from_json(read_json(dir / ("model_" + kind + ".json")));
        const Eigen::VectorXd s = score_rows(model, scores);
        const std::span<const double> sv(s.data(), static_cast<std::size_t>(s.size()));
        const RocCurve curve = roc_curve(sv, val_labels);
        run.reports[kind] = emit_report(dir, curve, auc(curve), accuracy(sv, val_labels, config.threshold), kind, seed,
                                        result.config_digest);
      }
      write_combined_summary(dir / "summary.json", run.reports);

      nlohmann::json artifacts = nlohmann::json::array();
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().filename() != "artifacts.json") {
          artifacts.push_back(entry.path().filename().string());
        }
      }
      std::sort(artifacts.begin(), artifacts.end());
      nlohmann::json manifest{{"artifacts", artifacts}};
      stamp(manifest, result.config_digest, seed);
      write_json(dir / "artifacts.json", manifest);

      result.runs.push_back(std::move(run));
    }
    write_json(fs::path(config.output_dir) / "summary.json", summary_json(config, result));
    return result;
  });
  return result;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  run_featurize(config);
  run_split(config);
  run_train(config);
  return run_eval(config);
}

nlohmann::json summary_json(const PipelineConfig& config, const PipelineResult& result) {
  nlohmann::json doc;
  doc["config_digest"] = result.config_digest;
  doc["model_kind"] = to_string(config.model_kind);
  nlohmann::json runs = nlohmann::json::array();
  std::map<std::string, std::pair<double, double>> sums;
  for (const auto& run : result.runs) {
    nlohmann::json reports = nlohmann::json::object();
    for (const auto& [type, report] : run.reports) {
      reports[type] = to_json(report);
      sums[type].first += report.auc;
      sums[type].second += report.accuracy;
    }
    runs.push_back({{"seed", run.seed}, {"reports", reports}});
  }
  doc["runs"] = runs;
  nlohmann::json mean = nlohmann::json::object();
  const double n = static_cast<double>(result.runs.size());
  for (const auto& [type, s] : sums) {
    mean[type] = {{"auc", s.first / n}, {"accuracy", s.second / n}};
  }
  doc["mean_over_seeds"] = mean;
  return doc;
}

} // namespace cpml
