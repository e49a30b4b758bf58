#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Mann-Whitney pair statistic: P(score_pos > score_neg) + 0.5 P(tie).
inline double mann_whitney_auc(std::span<const double> scores, std::span<const int> labels) {
  long long twice = 0;
  long long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) twice += 2;
      else if (scores[i] == scores[j]) twice += 1;
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pairs));
}

/// Taylor series for erf, accurate to ~1e-15 for |x| <= 4.
inline double erf_series(double x) {
  long double sum = 0.0L;
  long double term = x; // x^(2n+1) / n!  with sign
  for (int n = 0; n < 200; ++n) {
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(static_cast<double>(add)) < 1e-22) break;
    term *= -static_cast<long double>(x) * x / (n + 1);
  }
  return static_cast<double>(sum * 2.0L / std::sqrt(3.14159265358979323846264338327950288L));
}

inline double normal_cdf_series(double x) { return 0.5 * (1.0 + erf_series(x / std::sqrt(2.0))); }

/// SVM dual objective sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij with RBF kernel.
inline double svm_dual(const Eigen::MatrixXd& x, std::span<const int> y, std::span<const double> a, double gamma) {
  double lin = 0.0;
  double quad = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    lin += a[i];
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const double k = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
      quad += a[i] * a[j] * y[i] * y[j] * k;
    }
  }
  return lin - 0.5 * quad;
}

/// Exhaustive grid search over the feasible dual set of a 4-point problem.
/// The equality constraint sum a_i y_i = 0 fixes a_3 from a_0..a_2.
inline double svm_grid_optimum(const Eigen::MatrixXd& x, std::span<const int> y, double C, double gamma,
                               int steps) {
  double k[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) k[i][j] = y[i] * y[j] * std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
  double best = -1e300;
  double a[4];
  const double h = C / steps;
  for (int i0 = 0; i0 <= steps; ++i0) {
    for (int i1 = 0; i1 <= steps; ++i1) {
      for (int i2 = 0; i2 <= steps; ++i2) {
        a[0] = i0 * h;
        a[1] = i1 * h;
        a[2] = i2 * h;
        const double partial = a[0] * y[0] + a[1] * y[1] + a[2] * y[2];
        a[3] = -partial * y[3];
        if (a[3] < -1e-12 || a[3] > C + 1e-12) continue;
        a[3] = std::min(std::max(a[3], 0.0), C);
        double quad = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) quad += a[i] * a[j] * k[i][j];
        best = std::max(best, a[0] + a[1] + a[2] + a[3] - 0.5 * quad);
      }
    }
  }
  return best;
}

/// Grid search followed by repeated zooming around the incumbent. The dual is
/// concave, so the zoomed grids close in on the global maximum.
inline double svm_grid_refined(const Eigen::MatrixXd& x, std::span<const int> y, double C, double gamma,
                               int steps, int zooms) {
  double k[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) k[i][j] = y[i] * y[j] * std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
  double lo[3] = {0, 0, 0};
  double hi[3] = {C, C, C};
  double best = -1e300;
  double arg[3] = {0, 0, 0};
  for (int z = 0; z <= zooms; ++z) {
    const double h[3] = {(hi[0] - lo[0]) / steps, (hi[1] - lo[1]) / steps, (hi[2] - lo[2]) / steps};
    for (int i0 = 0; i0 <= steps; ++i0)
      for (int i1 = 0; i1 <= steps; ++i1)
        for (int i2 = 0; i2 <= steps; ++i2) {
          double a[4] = {lo[0] + i0 * h[0], lo[1] + i1 * h[1], lo[2] + i2 * h[2], 0.0};
          a[3] = -(a[0] * y[0] + a[1] * y[1] + a[2] * y[2]) * y[3];
          if (a[3] < 0.0 || a[3] > C) continue;
          double quad = 0.0;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) quad += a[i] * a[j] * k[i][j];
          const double obj = a[0] + a[1] + a[2] + a[3] - 0.5 * quad;
          if (obj > best) {
            best = obj;
            arg[0] = a[0];
            arg[1] = a[1];
            arg[2] = a[2];
          }
        }
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::max(0.0, arg[d] - 2 * h[d]);
      hi[d] = std::min(C, arg[d] + 2 * h[d]);
    }
  }
  return best;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = nd(gen);
  return m;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(CPML_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace oracle
