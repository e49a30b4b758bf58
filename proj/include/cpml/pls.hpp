#pragma once

#include "cpml/error.hpp"

#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace cpml {

inline constexpr std::size_t kDefaultPlsComponents = 15;

/// Fitted single-response PLS projection.
struct PlsModel {
  Eigen::VectorXd x_means;
  Eigen::VectorXd x_scales; // all ones unless fitted with scaling
  double y_mean = 0.0;
  Eigen::MatrixXd weights;    // features x k, unit-norm columns
  Eigen::MatrixXd x_loadings; // features x k
  Eigen::VectorXd y_loadings; // k

  std::size_t n_components() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t n_features() const { return static_cast<std::size_t>(x_means.size()); }
};

/// Fit result with the training-side byproducts that tests and diagnostics use.
struct PlsFit {
  PlsModel model;
  Eigen::MatrixXd scores;            // rows x k
  Eigen::MatrixXd residual;          // X after the last deflation (centered/scaled space)
  double initial_norm = 0.0;         // Frobenius norm of the centered X
  std::vector<double> residual_norms; // Frobenius norm after each deflation
};

/// Raised when the data support fewer components than requested.
class PlsRankError : public Error {
public:
  PlsRankError(std::size_t achievable, const std::string& what) : Error(what), achievable_(achievable) {}
  std::size_t achievable() const { return achievable_; }

private:
  std::size_t achievable_;
};

/// PLS1 by NIPALS deflation. Each component has the closed form
/// w = X'y / |X'y|, t = Xw, p = X't / t't, q = y't / t't, followed by
/// X <- X - t p' and y <- y - q t. Requires 1 <= k <= min(rows - 1, features)
/// and a non-constant y.
PlsFit fit_pls_detailed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        std::size_t n_components = kDefaultPlsComponents, bool scale = false);
PlsModel fit_pls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                 std::size_t n_components = kDefaultPlsComponents, bool scale = false);

/// Projects rows onto the fitted components. Row-independent.
Eigen::MatrixXd transform(const PlsModel& model, const Eigen::MatrixXd& x);

nlohmann::json to_json(const PlsModel& model);
PlsModel pls_from_json(const nlohmann::json& doc);

} // namespace cpml
