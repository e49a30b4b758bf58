#include "cpml/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

namespace cpml {

namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kCacheBytes = std::size_t{256} << 20;

// Kernel rows on demand. Holds every row when they fit in kCacheBytes,
// otherwise evicts the oldest row first.
class KernelRows {
public:
  KernelRows(const Eigen::MatrixXd& x, double gamma)
      : x_(x), gamma_(gamma),
        capacity_(std::max<std::size_t>(2, kCacheBytes / (sizeof(double) * static_cast<std::size_t>(
                                                                         std::max<Eigen::Index>(1, x.rows()))))) {}

  /// Row i of the kernel matrix. Never evicts row `keep`, so a reference to
  /// it obtained earlier stays valid.
  const std::vector<double>& row(std::size_t i, std::size_t keep) {
    if (auto it = rows_.find(i); it != rows_.end()) {
      return it->second;
    }
    if (rows_.size() >= capacity_) {
      if (order_.front() == keep) {
        order_.push_back(keep);
        order_.pop_front();
      }
      rows_.erase(order_.front());
      order_.pop_front();
    }
    std::vector<double> r(static_cast<std::size_t>(x_.rows()));
    const Eigen::Index ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < x_.rows(); ++j) {
      const double d2 = (x_.row(ii) - x_.row(j)).squaredNorm();
      r[static_cast<std::size_t>(j)] = std::exp(-gamma_ * d2);
    }
    order_.push_back(i);
    return rows_.emplace(i, std::move(r)).first->second;
  }

private:
  const Eigen::MatrixXd& x_;
  double gamma_;
  std::size_t capacity_;
  std::unordered_map<std::size_t, std::vector<double>> rows_;
  std::deque<std::size_t> order_;
};

void validate_inputs(const Eigen::MatrixXd& x, std::span<const int> y, const char* who) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(std::string(who) + ": X has " + std::to_string(x.rows()) + " rows but y has " +
                std::to_string(y.size()) + " labels");
  }
  bool pos = false;
  bool neg = false;
  for (int l : y) {
    if (l == 1) {
      pos = true;
    } else if (l == -1) {
      neg = true;
    } else {
      throw Error(std::string(who) + ": labels must be -1 or +1");
    }
  }
  if (!pos || !neg) {
    throw Error(std::string(who) + ": both classes must be present");
  }
  if (!x.allFinite()) {
    throw Error(std::string(who) + ": non-finite input");
  }
}

// Fills objective and KKT diagnostics from scratch (fresh kernel evaluations).
void finalize_diagnostics(const Eigen::MatrixXd& x, std::span<const int> y, double gamma, double C, double bias,
                          SvmDiagnostics& diag) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd decision = Eigen::VectorXd::Constant(n, bias);
  double quad = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (diag.alpha(j) != 0.0) {
        sum += diag.alpha(j) * y[static_cast<std::size_t>(j)] * rbf_kernel(x.row(i), x.row(j), gamma);
      }
    }
    decision(i) += sum;
    quad += diag.alpha(i) * y[static_cast<std::size_t>(i)] * sum;
  }
  diag.dual_objective = diag.alpha.sum() - 0.5 * quad;

  double worst = 0.0;
  const double bound_eps = 1e-12 * C;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double margin = y[static_cast<std::size_t>(i)] * decision(i);
    const double a = diag.alpha(i);
    double v = 0.0;
    if (a <= bound_eps) {
      v = std::max(0.0, 1.0 - margin);
    } else if (a >= C - bound_eps) {
      v = std::max(0.0, margin - 1.0);
    } else {
      v = std::abs(margin - 1.0);
    }
    worst = std::max(worst, v);
  }
  diag.max_kkt_violation = worst;
}

} // namespace

double rbf_kernel(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double gamma) {
  return std::exp(-gamma * (u - v).squaredNorm());
}

double default_gamma(const Eigen::MatrixXd& x) {
  const Eigen::Index d = x.cols();
  if (d == 0 || x.rows() == 0) {
    return 1.0;
  }
  // population variance over every entry of X
  const double count = static_cast<double>(x.size());
  const double mean = x.sum() / count;
  const double variance = (x.array() - mean).square().sum() / count;
  if (!(variance > 0.0)) {
    return 1.0 / static_cast<double>(d);
  }
  return 1.0 / (static_cast<double>(d) * variance);
}

SvmFit train_svm_detailed(const Eigen::MatrixXd& x, std::span<const int> y, const SvmParams& params) {
  validate_inputs(x, y, "train_svm");
  if (!(params.C > 0.0)) {
    throw Error("train_svm: C must be > 0");
  }
  const double gamma = params.gamma.value_or(default_gamma(x));
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error("train_svm: gamma must be > 0");
  }
  const double C = params.C;
  const std::size_t n = y.size();
  std::size_t max_iter = params.max_iterations;
  if (max_iter == 0) {
    max_iter = std::min<std::size_t>(std::max<std::size_t>(10 * n, 10000), 10'000'000);
  }

  KernelRows kernel(x, gamma);
  SvmDiagnostics diag;
  diag.alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0); // gradient of 1/2 a'Qa - e'a

  auto in_up = [&](std::size_t t) { return y[t] == 1 ? alpha[t] < C : alpha[t] > 0.0; };
  auto in_low = [&](std::size_t t) { return y[t] == 1 ? alpha[t] > 0.0 : alpha[t] < C; };

  double m_up = 0.0;
  double m_low = 0.0;
  std::size_t iter = 0;
  for (;;) {
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low(t) && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    if (i == n || j == n || m_up - m_low < params.tol) {
      break;
    }
    if (iter >= max_iter) {
      diag.iterations = iter;
      diag.final_gap = m_up - m_low;
      for (std::size_t t = 0; t < n; ++t) {
        diag.alpha(static_cast<Eigen::Index>(t)) = alpha[t];
      }
      throw SvmConvergenceError("train_svm: no convergence after " + std::to_string(iter) +
                                    " iterations (pair gap " + std::to_string(m_up - m_low) + ", tol " +
                                    std::to_string(params.tol) + ")",
                                std::move(diag));
    }
    ++iter;

    const std::vector<double>& ki = kernel.row(i, n);
    const std::vector<double>& kj = kernel.row(j, i);
    const double yi = y[i];
    const double yj = y[j];
    const double qij = yi * yj * ki[j];
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];

    if (y[i] != y[j]) {
      double quad = ki[i] + kj[j] + 2.0 * qij;
      if (quad <= 0.0) {
        quad = kTau;
      }
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = ki[i] + kj[j] - 2.0 * qij;
      if (quad <= 0.0) {
        quad = kTau;
      }
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (yi * ki[t] * dai + yj * kj[t] * daj);
    }
  }

  // Bias: mean over free vectors of -y G, else the midpoint of the pair bounds.
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0 && alpha[t] < C) {
      free_sum += -y[t] * grad[t];
      ++n_free;
    }
  }
  double bias = 0.0;
  if (n_free > 0) {
    bias = free_sum / static_cast<double>(n_free);
  } else if (std::isfinite(m_up) && std::isfinite(m_low)) {
    bias = 0.5 * (m_up + m_low);
  }

  SvmFit fit;
  SvmModel& model = fit.model;
  model.bias = bias;
  model.gamma = gamma;
  model.C = C;
  std::size_t n_sv = 0;
  for (double a : alpha) {
    n_sv += a != 0.0 ? 1 : 0;
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(n_sv), x.cols());
  model.alphas.resize(static_cast<Eigen::Index>(n_sv));
  Eigen::Index k = 0;
  for (std::size_t t = 0; t < n; ++t) {
    diag.alpha(static_cast<Eigen::Index>(t)) = alpha[t];
    if (alpha[t] != 0.0) {
      model.support_vectors.row(k) = x.row(static_cast<Eigen::Index>(t));
      model.alphas(k) = alpha[t] * y[t];
      ++k;
    }
  }
  diag.iterations = iter;
  diag.final_gap = std::isfinite(m_up - m_low) ? m_up - m_low : 0.0;
  finalize_diagnostics(x, y, gamma, C, bias, diag);
  fit.diagnostics = std::move(diag);
  return fit;
}

SvmModel train_svm(const Eigen::MatrixXd& x, std::span<const int> y, const SvmParams& params) {
  return train_svm_detailed(x, y, params).model;
}

double svm_score(const SvmModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.support_vectors.cols()) {
    throw Error("svm_score: expected " + std::to_string(model.support_vectors.cols()) + " features, got " +
                std::to_string(x.size()));
  }
  double s = model.bias;
  for (Eigen::Index i = 0; i < model.support_vectors.rows(); ++i) {
    s += model.alphas(i) * std::exp(-model.gamma * (model.support_vectors.row(i).transpose() - x).squaredNorm());
  }
  return s;
}

} // namespace cpml
