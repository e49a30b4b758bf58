#include "cpml/classifiers.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace cpml {

namespace {

QdaClass fit_class(const Eigen::MatrixXd& rows, double prior, double cutoff) {
  QdaClass c;
  const double n = static_cast<double>(rows.rows());
  c.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - c.mean.transpose();
  c.covariance = (centered.transpose() * centered) / (n - 1.0);
  c.covariance = 0.5 * (c.covariance + c.covariance.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.covariance);
  if (eig.info() != Eigen::Success) {
    throw Error("train_qda: eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  const double lambda_max = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
  const double keep_above = cutoff * lambda_max;

  c.covariance_pinv = Eigen::MatrixXd::Zero(c.covariance.rows(), c.covariance.cols());
  c.log_pseudo_det = 0.0;
  c.rank = 0;
  if (lambda_max > 0.0) {
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      if (lambda(k) > keep_above) {
        c.covariance_pinv += (vecs.col(k) / lambda(k)) * vecs.col(k).transpose();
        c.log_pseudo_det += std::log(lambda(k));
        ++c.rank;
      }
    }
  }
  c.log_prior = std::log(prior);
  return c;
}

double class_log_density(const QdaClass& c, const Eigen::VectorXd& x) {
  const Eigen::VectorXd d = x - c.mean;
  return -0.5 * d.dot(c.covariance_pinv * d) - 0.5 * c.log_pseudo_det + c.log_prior;
}

} // namespace

QdaModel train_qda(const Eigen::MatrixXd& x, std::span<const int> y, double eigen_cutoff) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error("train_qda: X rows and label count differ");
  }
  std::vector<Eigen::Index> pos;
  std::vector<Eigen::Index> neg;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1) {
      pos.push_back(static_cast<Eigen::Index>(i));
    } else if (y[i] == -1) {
      neg.push_back(static_cast<Eigen::Index>(i));
    } else {
      throw Error("train_qda: labels must be -1 or +1");
    }
  }
  if (pos.size() < 2 || neg.size() < 2) {
    throw Error("train_qda: each class needs at least 2 samples (positive " + std::to_string(pos.size()) +
                ", negative " + std::to_string(neg.size()) + ")");
  }
  if (!x.allFinite()) {
    throw Error("train_qda: non-finite input");
  }
  const double n = static_cast<double>(y.size());
  QdaModel model;
  model.positive = fit_class(x(pos, Eigen::all), static_cast<double>(pos.size()) / n, eigen_cutoff);
  model.negative = fit_class(x(neg, Eigen::all), static_cast<double>(neg.size()) / n, eigen_cutoff);
  return model;
}

double qda_score(const QdaModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.positive.mean.size()) {
    throw Error("qda_score: expected " + std::to_string(model.positive.mean.size()) + " features, got " +
                std::to_string(x.size()));
  }
  return class_log_density(model.positive, x) - class_log_density(model.negative, x);
}

} // namespace cpml
