#pragma once

#include "cpml/error.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace cpml {

/// Maps {0,1} data-layer labels to the {-1,+1} labels the trainers use.
std::vector<int> to_signed_labels(std::span<const int> labels01);

// ---------------------------------------------------------------------------
// RBF support vector machine trained by SMO.

struct SvmParams {
  double C = 1.0;
  /// Kernel width; when unset, 1 / (d * variance of all entries of X).
  std::optional<double> gamma;
  double tol = 1e-3;
  /// 0 selects max(10 n, 10000) capped at 1e7.
  std::size_t max_iterations = 0;
};

struct SvmModel {
  Eigen::MatrixXd support_vectors; // one row per support vector
  Eigen::VectorXd alphas;          // signed: alpha_i * y_i
  double bias = 0.0;
  double gamma = 1.0;
  double C = 1.0;
};

struct SvmDiagnostics {
  std::size_t iterations = 0;
  double final_gap = 0.0;        // max violating pair gap m - M at exit
  double dual_objective = 0.0;   // sum(alpha) - 1/2 alpha' Q alpha
  double max_kkt_violation = 0.0;
  Eigen::VectorXd alpha;         // unsigned dual variables for every training row
};

struct SvmFit {
  SvmModel model;
  SvmDiagnostics diagnostics;
};

class SvmConvergenceError : public Error {
public:
  SvmConvergenceError(const std::string& what, SvmDiagnostics diag) : Error(what), diag_(std::move(diag)) {}
  const SvmDiagnostics& diagnostics() const { return diag_; }

private:
  SvmDiagnostics diag_;
};

double rbf_kernel(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double gamma);
double default_gamma(const Eigen::MatrixXd& x);

/// Soft-margin dual solved with sequential minimal optimization, working pair
/// chosen as the maximal violating pair. Stops once the pair gap is below tol,
/// which puts every sample within tol of its KKT condition.
SvmFit train_svm_detailed(const Eigen::MatrixXd& x, std::span<const int> y, const SvmParams& params = {});
SvmModel train_svm(const Eigen::MatrixXd& x, std::span<const int> y, const SvmParams& params = {});
double svm_score(const SvmModel& model, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Quadratic discriminant with pseudo-inverse covariances.

inline constexpr double kQdaEigenCutoff = 1e-10;

struct QdaClass {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd covariance_pinv;
  double log_pseudo_det = 0.0;
  double log_prior = 0.0;
  std::size_t rank = 0;
};

struct QdaModel {
  QdaClass positive;
  QdaClass negative;
};

/// Eigenvalues at or below cutoff * lambda_max are dropped from both the
/// pseudo-inverse and the pseudo-determinant.
QdaModel train_qda(const Eigen::MatrixXd& x, std::span<const int> y, double eigen_cutoff = kQdaEigenCutoff);
/// Log-likelihood ratio, positive favors the positive class.
double qda_score(const QdaModel& model, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Discrete AdaBoost over decision stumps.

struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1; // predicts `polarity` above the threshold, `-polarity` at or below

  int predict(const Eigen::VectorXd& x) const { return x(static_cast<Eigen::Index>(feature)) > threshold ? polarity : -polarity; }
};

struct BoostRound {
  Stump stump;
  double alpha = 0.0;
};

struct AdaBoostModel {
  std::vector<BoostRound> rounds;
  std::size_t n_rounds = 50;
  std::size_t n_features = 0;
};

struct RoundDiagnostics {
  double error = 0.0;            // weighted error of the selected stump
  double alpha = 0.0;
  double normalizer = 0.0;       // sum of the updated weights before renormalizing
  double weight_sum = 0.0;       // after renormalizing
  double reweighted_error = 0.0; // selected stump's error under the new weights
};

struct AdaBoostFit {
  AdaBoostModel model;
  std::vector<RoundDiagnostics> rounds;
};

inline constexpr double kAdaErrorClamp = 1e-10;

/// Each round picks the stump with the lowest weighted error over all features
/// and midpoint thresholds (ties: lower feature, lower threshold, polarity +1).
/// Stops early when no stump beats 0.5 or a perfect stump is found.
AdaBoostFit train_adaboost_detailed(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t n_rounds = 50);
AdaBoostModel train_adaboost(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t n_rounds = 50);
double ada_score(const AdaBoostModel& model, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Common contract.

using TrainedClassifier = std::variant<SvmModel, QdaModel, AdaBoostModel>;

std::string model_type(const TrainedClassifier& model);
std::size_t input_dimension(const TrainedClassifier& model);
double score(const TrainedClassifier& model, const Eigen::VectorXd& x);
Eigen::VectorXd score_rows(const TrainedClassifier& model, const Eigen::MatrixXd& x);
/// 1 iff score >= threshold.
int predict(const TrainedClassifier& model, const Eigen::VectorXd& x, double threshold = 0.0);

nlohmann::json to_json(const TrainedClassifier& model);
TrainedClassifier classifier_from_json(const nlohmann::json& doc);

} // namespace cpml
