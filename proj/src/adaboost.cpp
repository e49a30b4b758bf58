#include "cpml/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cpml {

namespace {

constexpr double kBeatsChance = 0.5 - 1e-12;

struct Candidate {
  Stump stump;
  double error = 1.0;
};

// Weighted error of a stump, summed directly over the samples.
double stump_error(const Stump& s, const Eigen::MatrixXd& x, std::span<const int> y, const std::vector<double>& w) {
  double err = 0.0;
  const auto f = static_cast<Eigen::Index>(s.feature);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int h = x(i, f) > s.threshold ? s.polarity : -s.polarity;
    if (h != y[static_cast<std::size_t>(i)]) {
      err += w[static_cast<std::size_t>(i)];
    }
  }
  return err;
}

Candidate best_stump(const Eigen::MatrixXd& x, std::span<const int> y, const std::vector<double>& w,
                     const std::vector<std::vector<Eigen::Index>>& sorted) {
  double w_pos = 0.0;
  double w_neg = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    (y[i] == 1 ? w_pos : w_neg) += w[i];
  }

  Candidate best;
  best.error = std::numeric_limits<double>::infinity();
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    const auto& order = sorted[static_cast<std::size_t>(f)];
    double left_pos = 0.0;
    double left_neg = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const auto idx = static_cast<std::size_t>(order[k]);
      (y[idx] == 1 ? left_pos : left_neg) += w[idx];
      const double v = x(order[k], f);
      const double next = x(order[k + 1], f);
      if (!(next > v)) {
        continue;
      }
      const double threshold = 0.5 * (v + next);
      // polarity +1 predicts +1 above the threshold
      const double err_up = left_pos + (w_neg - left_neg);
      const double err_down = left_neg + (w_pos - left_pos);
      if (err_up < best.error) {
        best = {Stump{static_cast<std::size_t>(f), threshold, 1}, err_up};
      }
      if (err_down < best.error) {
        best = {Stump{static_cast<std::size_t>(f), threshold, -1}, err_down};
      }
    }
  }
  return best;
}

} // namespace

AdaBoostFit train_adaboost_detailed(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t n_rounds) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error("train_adaboost: X rows and label count differ");
  }
  if (n_rounds < 1) {
    throw Error("train_adaboost: n_rounds must be >= 1");
  }
  bool pos = false;
  bool neg = false;
  for (int l : y) {
    if (l != 1 && l != -1) {
      throw Error("train_adaboost: labels must be -1 or +1");
    }
    (l == 1 ? pos : neg) = true;
  }
  if (!pos || !neg) {
    throw Error("train_adaboost: both classes must be present");
  }

  const std::size_t n = y.size();
  std::vector<std::vector<Eigen::Index>> sorted(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    auto& order = sorted[static_cast<std::size_t>(f)];
    order.resize(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a, f) < x(b, f); });
  }

  AdaBoostFit fit;
  fit.model.n_rounds = n_rounds;
  fit.model.n_features = static_cast<std::size_t>(x.cols());
  std::vector<double> w(n, 1.0 / static_cast<double>(n));

  for (std::size_t round = 0; round < n_rounds; ++round) {
    const Candidate cand = best_stump(x, y, w, sorted);
    const double eps = std::isfinite(cand.error) ? stump_error(cand.stump, x, y, w) : 1.0;
    if (!(eps < kBeatsChance)) {
      if (round == 0) {
        throw Error("train_adaboost: unlearnable under stumps (no stump has weighted error below 0.5)");
      }
      break;
    }
    const double eps_c = std::clamp(eps, kAdaErrorClamp, 1.0 - kAdaErrorClamp);
    const double alpha = 0.5 * std::log((1.0 - eps_c) / eps_c);

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int h = cand.stump.predict(x.row(static_cast<Eigen::Index>(i)).transpose());
      w[i] *= std::exp(-alpha * y[i] * h);
      z += w[i];
    }
    double total = 0.0;
    for (double& wi : w) {
      wi /= z;
      total += wi;
    }

    RoundDiagnostics diag;
    diag.error = eps;
    diag.alpha = alpha;
    diag.normalizer = z;
    diag.weight_sum = total;
    diag.reweighted_error = stump_error(cand.stump, x, y, w);
    fit.rounds.push_back(diag);
    fit.model.rounds.push_back({cand.stump, alpha});

    if (eps <= kAdaErrorClamp) {
      break; // perfect stump; further rounds would repeat it
    }
  }
  return fit;
}

AdaBoostModel train_adaboost(const Eigen::MatrixXd& x, std::span<const int> y, std::size_t n_rounds) {
  return train_adaboost_detailed(x, y, n_rounds).model;
}

double ada_score(const AdaBoostModel& model, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != model.n_features) {
    throw Error("ada_score: expected " + std::to_string(model.n_features) + " features, got " +
                std::to_string(x.size()));
  }
  double s = 0.0;
  for (const auto& r : model.rounds) {
    s += r.alpha * r.stump.predict(x);
  }
  return s;
}

} // namespace cpml
