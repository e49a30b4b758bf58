#include "cpml/classifiers.hpp"

#include "cpml/json_util.hpp"

namespace cpml {

std::vector<int> to_signed_labels(std::span<const int> labels01) {
  std::vector<int> out;
  out.reserve(labels01.size());
  for (int l : labels01) {
    if (l != 0 && l != 1) {
      throw Error("labels must be 0 or 1");
    }
    out.push_back(l == 1 ? 1 : -1);
  }
  return out;
}

std::string model_type(const TrainedClassifier& model) {
  struct Visitor {
    std::string operator()(const SvmModel&) const { return "svm"; }
    std::string operator()(const QdaModel&) const { return "qda"; }
    std::string operator()(const AdaBoostModel&) const { return "adaboost"; }
  };
  return std::visit(Visitor{}, model);
}

std::size_t input_dimension(const TrainedClassifier& model) {
  struct Visitor {
    std::size_t operator()(const SvmModel& m) const { return static_cast<std::size_t>(m.support_vectors.cols()); }
    std::size_t operator()(const QdaModel& m) const { return static_cast<std::size_t>(m.positive.mean.size()); }
    std::size_t operator()(const AdaBoostModel& m) const { return m.n_features; }
  };
  return std::visit(Visitor{}, model);
}

double score(const TrainedClassifier& model, const Eigen::VectorXd& x) {
  struct Visitor {
    const Eigen::VectorXd& x;
    double operator()(const SvmModel& m) const { return svm_score(m, x); }
    double operator()(const QdaModel& m) const { return qda_score(m, x); }
    double operator()(const AdaBoostModel& m) const { return ada_score(m, x); }
  };
  return std::visit(Visitor{x}, model);
}

Eigen::VectorXd score_rows(const TrainedClassifier& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out(i) = score(model, x.row(i).transpose());
  }
  return out;
}

int predict(const TrainedClassifier& model, const Eigen::VectorXd& x, double threshold) {
  return score(model, x) >= threshold ? 1 : 0;
}

namespace {

nlohmann::json header(const std::string& type) {
  nlohmann::json doc;
  doc["model_type"] = type;
  doc["schema_version"] = 1;
  return doc;
}

nlohmann::json qda_class_to_json(const QdaClass& c) {
  return {
      {"mean", json_util::vector_to_json(c.mean)},
      {"covariance", json_util::rows_to_json(c.covariance)},
      {"covariance_pinv", json_util::rows_to_json(c.covariance_pinv)},
      {"log_pseudo_det", c.log_pseudo_det},
      {"log_prior", c.log_prior},
      {"rank", c.rank},
  };
}

QdaClass qda_class_from_json(const nlohmann::json& doc) {
  QdaClass c;
  c.mean = json_util::vector_from_json(doc.at("mean"));
  c.covariance = json_util::rows_from_json(doc.at("covariance"), c.mean.size());
  c.covariance_pinv = json_util::rows_from_json(doc.at("covariance_pinv"), c.mean.size());
  c.log_pseudo_det = doc.at("log_pseudo_det").get<double>();
  c.log_prior = doc.at("log_prior").get<double>();
  c.rank = doc.at("rank").get<std::size_t>();
  return c;
}

} // namespace

nlohmann::json to_json(const TrainedClassifier& model) {
  if (const auto* svm = std::get_if<SvmModel>(&model)) {
    auto doc = header("svm");
    doc["n_features"] = svm->support_vectors.cols();
    doc["support_vectors"] = json_util::rows_to_json(svm->support_vectors);
    doc["alphas"] = json_util::vector_to_json(svm->alphas);
    doc["bias"] = svm->bias;
    doc["gamma"] = svm->gamma;
    doc["C"] = svm->C;
    return doc;
  }
  if (const auto* qda = std::get_if<QdaModel>(&model)) {
    auto doc = header("qda");
    doc["n_features"] = qda->positive.mean.size();
    doc["positive"] = qda_class_to_json(qda->positive);
    doc["negative"] = qda_class_to_json(qda->negative);
    return doc;
  }
  const auto& ada = std::get<AdaBoostModel>(model);
  auto doc = header("adaboost");
  doc["n_features"] = ada.n_features;
  doc["n_rounds"] = ada.n_rounds;
  auto rounds = nlohmann::json::array();
  for (const auto& r : ada.rounds) {
    rounds.push_back({{"feature", r.stump.feature},
                      {"threshold", r.stump.threshold},
                      {"polarity", r.stump.polarity},
                      {"alpha", r.alpha}});
  }
  doc["rounds"] = rounds;
  return doc;
}

TrainedClassifier classifier_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("model_type")) {
    throw Error("model file: missing model_type");
  }
  const std::string type = doc.at("model_type").get<std::string>();
  json_util::expect_type(doc, type);
  const auto dim = doc.at("n_features").get<Eigen::Index>();
  if (type == "svm") {
    SvmModel m;
    m.support_vectors = json_util::rows_from_json(doc.at("support_vectors"), dim);
    m.alphas = json_util::vector_from_json(doc.at("alphas"));
    m.bias = doc.at("bias").get<double>();
    m.gamma = doc.at("gamma").get<double>();
    m.C = doc.at("C").get<double>();
    if (m.alphas.size() != m.support_vectors.rows()) {
      throw Error("svm model: alpha count does not match support vectors");
    }
    return m;
  }
  if (type == "qda") {
    QdaModel m;
    m.positive = qda_class_from_json(doc.at("positive"));
    m.negative = qda_class_from_json(doc.at("negative"));
    if (m.positive.mean.size() != dim || m.negative.mean.size() != dim) {
      throw Error("qda model: dimension mismatch");
    }
    return m;
  }
  if (type == "adaboost") {
    AdaBoostModel m;
    m.n_features = static_cast<std::size_t>(dim);
    m.n_rounds = doc.at("n_rounds").get<std::size_t>();
    for (const auto& r : doc.at("rounds")) {
      BoostRound br;
      br.stump.feature = r.at("feature").get<std::size_t>();
      br.stump.threshold = r.at("threshold").get<double>();
      br.stump.polarity = r.at("polarity").get<int>();
      br.alpha = r.at("alpha").get<double>();
      if (br.stump.feature >= m.n_features || (br.stump.polarity != 1 && br.stump.polarity != -1)) {
        throw Error("adaboost model: invalid stump");
      }
      m.rounds.push_back(br);
    }
    return m;
  }
  throw Error("model file: unknown model_type '" + type + "'");
}

} // namespace cpml
