#include "cpml/pls.hpp"

#include "cpml/json_util.hpp"

#include <algorithm>
#include <cmath>

namespace cpml {

namespace {

// Explicit loops keep the per-row summation order fixed (feature 0..p-1),
// so fit-time scores and transform() agree bit for bit, row by row.
void compute_scores(const Eigen::MatrixXd& x, const Eigen::VectorXd& w, Eigen::VectorXd& t) {
  t.setZero(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double wj = w(j);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      t(i) += x(i, j) * wj;
    }
  }
}

void deflate(Eigen::MatrixXd& x, const Eigen::VectorXd& t, const Eigen::VectorXd& p) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double pj = p(j);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      x(i, j) -= t(i) * pj;
    }
  }
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& x, const Eigen::VectorXd& means, const Eigen::VectorXd& scales) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out(i, j) = (x(i, j) - means(j)) / scales(j);
    }
  }
  return out;
}

} // namespace

PlsFit fit_pls_detailed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t n_components,
                        bool scale) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto m = static_cast<std::size_t>(x.cols());
  if (static_cast<std::size_t>(y.size()) != n) {
    throw Error("fit_pls: X has " + std::to_string(n) + " rows but y has " + std::to_string(y.size()));
  }
  if (n < 2) {
    throw Error("fit_pls: need at least 2 rows");
  }
  const std::size_t bound = std::min(n - 1, m);
  if (n_components < 1 || n_components > bound) {
    throw Error("fit_pls: n_components = " + std::to_string(n_components) + " outside [1, " +
                std::to_string(bound) + "]");
  }
  if ((y.array() == y(0)).all()) {
    throw Error("fit_pls: y is constant");
  }

  PlsFit fit;
  PlsModel& model = fit.model;
  model.x_means = x.colwise().mean().transpose();
  model.x_scales = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
  if (scale) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double sd = std::sqrt((x.col(j).array() - model.x_means(j)).square().sum() / static_cast<double>(n - 1));
      model.x_scales(j) = sd > 0.0 ? sd : 1.0;
    }
  }
  model.y_mean = y.mean();

  Eigen::MatrixXd xr = standardize(x, model.x_means, model.x_scales);
  Eigen::VectorXd yr = y.array() - model.y_mean;
  fit.initial_norm = xr.norm();
  const double floor = 1e-12 * std::max(1.0, fit.initial_norm * yr.norm());

  const auto k = static_cast<Eigen::Index>(n_components);
  model.weights.resize(static_cast<Eigen::Index>(m), k);
  model.x_loadings.resize(static_cast<Eigen::Index>(m), k);
  model.y_loadings.resize(k);
  fit.scores.resize(static_cast<Eigen::Index>(n), k);

  Eigen::VectorXd t;
  for (Eigen::Index a = 0; a < k; ++a) {
    Eigen::VectorXd w = xr.transpose() * yr;
    const double wn = w.norm();
    if (!(wn >= floor)) {
      throw PlsRankError(static_cast<std::size_t>(a),
                         "fit_pls: X'y vanished at component " + std::to_string(a + 1) + "; only " +
                             std::to_string(a) + " components are achievable");
    }
    w /= wn;

    compute_scores(xr, w, t);
    const double tt = t.squaredNorm();
    if (!(tt > 0.0)) {
      throw PlsRankError(static_cast<std::size_t>(a), "fit_pls: zero score vector at component " +
                                                          std::to_string(a + 1));
    }
    const Eigen::VectorXd p = xr.transpose() * t / tt;
    const double q = yr.dot(t) / tt;

    deflate(xr, t, p);
    yr -= q * t;

    model.weights.col(a) = w;
    model.x_loadings.col(a) = p;
    model.y_loadings(a) = q;
    fit.scores.col(a) = t;
    fit.residual_norms.push_back(xr.norm());
  }
  fit.residual = std::move(xr);
  return fit;
}

PlsModel fit_pls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t n_components, bool scale) {
  return fit_pls_detailed(x, y, n_components, scale).model;
}

Eigen::MatrixXd transform(const PlsModel& model, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != model.n_features()) {
    throw Error("pls transform: expected " + std::to_string(model.n_features()) + " features, got " +
                std::to_string(x.cols()));
  }
  Eigen::MatrixXd xr = standardize(x, model.x_means, model.x_scales);
  Eigen::MatrixXd scores(x.rows(), model.weights.cols());
  Eigen::VectorXd t;
  for (Eigen::Index a = 0; a < model.weights.cols(); ++a) {
    compute_scores(xr, model.weights.col(a), t);
    deflate(xr, t, model.x_loadings.col(a));
    scores.col(a) = t;
  }
  return scores;
}

nlohmann::json to_json(const PlsModel& model) {
  nlohmann::json doc;
  doc["model_type"] = "pls";
  doc["schema_version"] = 1;
  doc["n_components"] = model.n_components();
  doc["n_features"] = model.n_features();
  doc["x_means"] = json_util::vector_to_json(model.x_means);
  doc["x_scales"] = json_util::vector_to_json(model.x_scales);
  doc["y_mean"] = model.y_mean;
  doc["weights"] = json_util::columns_to_json(model.weights);
  doc["x_loadings"] = json_util::columns_to_json(model.x_loadings);
  doc["y_loadings"] = json_util::vector_to_json(model.y_loadings);
  return doc;
}

PlsModel pls_from_json(const nlohmann::json& doc) {
  json_util::expect_type(doc, "pls");
  PlsModel model;
  model.x_means = json_util::vector_from_json(doc.at("x_means"));
  model.x_scales = json_util::vector_from_json(doc.at("x_scales"));
  model.y_mean = doc.at("y_mean").get<double>();
  model.weights = json_util::columns_from_json(doc.at("weights"), model.x_means.size());
  model.x_loadings = json_util::columns_from_json(doc.at("x_loadings"), model.x_means.size());
  model.y_loadings = json_util::vector_from_json(doc.at("y_loadings"));
  if (model.weights.cols() != model.y_loadings.size() || model.x_loadings.cols() != model.y_loadings.size() ||
      model.x_scales.size() != model.x_means.size()) {
    throw Error("pls model: inconsistent array shapes");
  }
  return model;
}

} // namespace cpml
