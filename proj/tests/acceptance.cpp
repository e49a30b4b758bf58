// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "cpml/classifiers.hpp"
#include "cpml/error.hpp"
#include "cpml/evaluation.hpp"
#include "cpml/partitioning.hpp"
#include "cpml/pipeline.hpp"
#include "cpml/pls.hpp"
#include "cpml/rng.hpp"
#include "cpml/synthetic.hpp"
#include "cpml/vital_features.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace cpml;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit; // seconds, 0 = none
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// --- AUC -------------------------------------------------------------------

Outcome auc_oracle() {
  std::mt19937_64 gen(20240101);
  double worst = 0.0;
  for (int draw = 0; draw < 10000; ++draw) {
    const std::size_t n = 2 + gen() % 199;
    std::vector<double> s(n);
    std::vector<int> l(n);
    const bool coarse = gen() % 2;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = coarse ? static_cast<double>(gen() % 8) : std::ldexp(static_cast<double>(gen() >> 11), -53);
      l[i] = static_cast<int>(gen() % 2);
    }
    // both classes present, at random positions
    const std::size_t p = gen() % n;
    l[p] = 1;
    l[(p + 1 + gen() % (n - 1)) % n] = 0;
    worst = std::max(worst, std::abs(auc(s, l) - oracle::mann_whitney_auc(s, l)));
  }
  return {worst <= 1e-12, "10000 draws, max |AUC - MW| = " + fmt("%.3g", worst)};
}

// --- PLS -------------------------------------------------------------------

Outcome pls_oracle() {
  std::mt19937_64 gen(77);
  double worst_cos = 1.0;
  double worst_orth = 0.0;
  for (int m = 0; m < 100; ++m) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(gen() % 48);
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(gen() % 20);
    const Eigen::MatrixXd x = oracle::random_matrix(gen, n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = static_cast<double>(gen() % 2);
    y(0) = 0;
    y(1) = 1;
    const auto k = static_cast<std::size_t>(std::min(n - 1, p));
    const auto fit = fit_pls_detailed(x, y, k);
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::VectorXd v = xc.transpose() * (y.array() - y.mean()).matrix();
    const auto w1 = fit.model.weights.col(0);
    worst_cos = std::min(worst_cos, w1.dot(v) / (w1.norm() * v.norm()));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        const auto ti = fit.scores.col(i);
        const auto tj = fit.scores.col(j);
        worst_orth = std::max(worst_orth, std::abs(ti.dot(tj)) / (ti.norm() * tj.norm()));
      }
  }
  return {worst_cos >= 1 - 1e-10 && worst_orth <= 1e-8,
          "100 matrices, min cosine = 1 - " + fmt("%.3g", 1 - worst_cos) + ", max relative |ti.tj| = " +
              fmt("%.3g", worst_orth)};
}

// --- SVM -------------------------------------------------------------------

Outcome svm_oracle() {
  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> c_dist(0.1, 10.0);
  std::uniform_real_distribution<double> g_dist(0.1, 2.0);
  double worst_gap = -1e300; // grid - smo, must stay <= 1e-4
  double worst_kkt = 0.0;
  double worst_eq = 0.0;
  int failures = 0;
  for (int problem = 0; problem < 200; ++problem) {
    const Eigen::MatrixXd x = oracle::random_matrix(gen, 4, 2);
    std::vector<int> y(4);
    for (auto& v : y) v = gen() % 2 ? 1 : -1;
    y[gen() % 4] = 1;
    if (std::count(y.begin(), y.end(), -1) == 0) y[(std::find(y.begin(), y.end(), 1) - y.begin() + 1) % 4] = -1;
    SvmParams params;
    params.C = c_dist(gen);
    params.gamma = g_dist(gen);
    params.tol = 1e-3;
    const auto fit = train_svm_detailed(x, y, params);
    std::vector<double> a(fit.diagnostics.alpha.data(), fit.diagnostics.alpha.data() + 4);
    const double smo = oracle::svm_dual(x, y, a, *params.gamma);
    const double grid = oracle::svm_grid_refined(x, y, params.C, *params.gamma, 24, 12);
    worst_gap = std::max(worst_gap, grid - smo);

    // KKT conditions recomputed from the stored model
    double eq = 0.0;
    for (int i = 0; i < 4; ++i) {
      eq += a[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
      const double margin = y[static_cast<std::size_t>(i)] * svm_score(fit.model, x.row(i));
      const double ai = a[static_cast<std::size_t>(i)];
      double violation = 0.0;
      if (ai <= 0.0) violation = std::max(0.0, 1.0 - margin);
      else if (ai >= params.C) violation = std::max(0.0, margin - 1.0);
      else violation = std::abs(margin - 1.0);
      worst_kkt = std::max(worst_kkt, violation);
      if (ai < 0.0 || ai > params.C) ++failures;
    }
    worst_eq = std::max(worst_eq, std::abs(eq));
  }
  const bool pass = worst_gap <= 1e-4 && worst_kkt <= 1e-3 && worst_eq <= 1e-6 && failures == 0;
  return {pass, "200 problems, max (grid - smo) = " + fmt("%.3g", worst_gap) + ", max KKT violation = " +
                    fmt("%.3g", worst_kkt) + ", max |sum a_i y_i| = " + fmt("%.3g", worst_eq)};
}

// --- QDA -------------------------------------------------------------------

Outcome qda_closed_form() {
  Eigen::MatrixXd x(6, 1);
  x << -1, 0, 1, 1, 2, 3; // means 0 and 2, sample variances 1 and 1
  const std::vector<int> y{-1, -1, -1, 1, 1, 1};
  const auto model = train_qda(x, y);
  auto f = [&](double v) { return qda_score(model, Eigen::VectorXd::Constant(1, v)); };
  double lo = 0.0;
  double hi = 2.0;
  for (int i = 0; i < 200 && hi - lo > 0; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
    if (mid == lo && mid == hi) break;
  }
  const double boundary = 0.5 * (lo + hi);
  const double s15 = f(1.5);
  return {std::abs(boundary - 1.0) <= 1e-9 && std::abs(f(1.0)) <= 1e-9 && s15 > 0,
          "boundary = " + fmt("%.12f", boundary) + ", score(1) = " + fmt("%.3g", f(1.0)) + ", score(1.5) = " +
              fmt("%.6f", s15)};
}

// --- AdaBoost --------------------------------------------------------------

Outcome adaboost_theorem() {
  std::mt19937_64 gen(99);
  int runs = 0;
  int rounds_checked = 0;
  int bound_fail = 0;
  double worst_sum = 0.0;
  double worst_reweight = 0.0;
  for (int run = 0; run < 200; ++run) {
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(gen() % 150);
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(gen() % 5);
    Eigen::MatrixXd x = oracle::random_matrix(gen, n, p);
    if (run % 3 == 0) x = x.array().round(); // ties in feature values
    std::vector<int> y(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) + 0.8 * std::sin(3.0 * static_cast<double>(i)) > 0 ? 1 : -1;
    y[0] = 1;
    y[1] = -1;
    AdaBoostFit fit;
    try {
      fit = train_adaboost_detailed(x, y, 1 + gen() % 50);
    } catch (const Error&) {
      continue;
    }
    ++runs;
    double bound = 1.0;
    for (const auto& r : fit.rounds) {
      ++rounds_checked;
      const double e = std::clamp(r.error, kAdaErrorClamp, 1 - kAdaErrorClamp);
      bound *= 2 * std::sqrt(e * (1 - e));
      worst_sum = std::max(worst_sum, std::abs(r.weight_sum - 1.0));
      if (r.error > kAdaErrorClamp) worst_reweight = std::max(worst_reweight, std::abs(r.reweighted_error - 0.5));
    }
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < n; ++i) wrong += (ada_score(fit.model, x.row(i)) > 0 ? 1 : -1) != y[static_cast<std::size_t>(i)];
    if (static_cast<double>(wrong) / static_cast<double>(n) > bound) ++bound_fail;
  }
  return {runs > 0 && bound_fail == 0 && worst_sum <= 1e-12 && worst_reweight <= 1e-10,
          std::to_string(runs) + " runs / " + std::to_string(rounds_checked) + " rounds, bound violations = " +
              std::to_string(bound_fail) + ", max |sum w - 1| = " + fmt("%.3g", worst_sum) +
              ", max |reweighted err - 0.5| = " + fmt("%.3g", worst_reweight)};
}

// --- staging ---------------------------------------------------------------

// Staging table written out independently; boundaries go to the more severe stage.
Stage table_stage(SignalKind kind, double v) {
  switch (kind) {
  case SignalKind::HeartRate:
    if (v >= 120) return Stage::VerySevere;
    if (v >= 110) return Stage::Severe;
    if (v >= 100) return Stage::Moderate;
    if (v >= 90) return Stage::Mild;
    return Stage::Normal;
  case SignalKind::RespRate:
    if (v >= 20) return Stage::Abnormal;
    if (v >= 18) return Stage::High;
    if (v < 12) return Stage::Low;
    return Stage::Normal;
  case SignalKind::SpO2:
    if (v <= 80) return Stage::VerySevere;
    if (v <= 85) return Stage::Severe;
    if (v <= 90) return Stage::Moderate;
    if (v <= 92) return Stage::Mild;
    return Stage::Normal;
  }
  return Stage::Normal;
}

Outcome staging_sweep() {
  std::size_t mismatches = 0;
  std::size_t checked = 0;
  for (SignalKind kind : {SignalKind::HeartRate, SignalKind::RespRate, SignalKind::SpO2}) {
    for (int i = 0; i <= 300 * 100; ++i) {
      const double v = i / 100.0;
      ++checked;
      mismatches += stage_sample(kind, v) != table_stage(kind, v);
    }
    for (double edge : {12.0, 18.0, 20.0, 80.0, 85.0, 90.0, 92.0, 100.0, 110.0, 120.0})
      for (double v : {std::nextafter(edge, 0.0), edge, std::nextafter(edge, 400.0)}) {
        ++checked;
        mismatches += stage_sample(kind, v) != table_stage(kind, v);
      }
  }
  const bool table_examples = stage_sample(SignalKind::HeartRate, 115) == Stage::Severe &&
                              stage_sample(SignalKind::RespRate, 10) == Stage::Low &&
                              stage_sample(SignalKind::SpO2, 78) == Stage::VerySevere;
  Rng rng(3);
  double worst = 0.0;
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> series(1 + rng.below(200));
    for (auto& v : series) v = 300.0 * rng.uniform01();
    for (SignalKind kind : {SignalKind::HeartRate, SignalKind::RespRate, SignalKind::SpO2}) {
      const auto f = bucket_fractions(kind, series);
      worst = std::max(worst, std::abs(std::accumulate(f.begin(), f.end(), 0.0) - 1.0));
    }
  }
  return {mismatches == 0 && table_examples && worst <= 1e-12,
          std::to_string(checked) + " grid/boundary values, mismatches = " + std::to_string(mismatches) +
              ", max |sum fractions - 1| = " + fmt("%.3g", worst)};
}

// --- balancing -------------------------------------------------------------

Outcome balancing_trials() {
  Rng rng(2025);
  int trials = 0;
  int bad_prevalence = 0;
  int bad_conservation = 0;
  while (trials < 1000) {
    const std::size_t n_pos = 1 + rng.below(100);
    const std::size_t n_neg = n_pos + 1 + rng.below(500);
    std::vector<LabeledKey> keys;
    std::unordered_map<std::string, int> labels;
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
      keys.push_back({"k" + std::to_string(i), 0});
      labels["k" + std::to_string(i)] = 0;
    }
    std::vector<std::size_t> idx(keys.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    for (std::size_t i = 0; i < n_pos; ++i) {
      keys[idx[i]].label = 1;
      labels[keys[idx[i]].id] = 1;
    }
    const double fraction = 0.2 + 0.6 * rng.uniform01();
    Split s;
    try {
      s = split(keys, fraction, rng.next_u64());
    } catch (const Error&) {
      continue;
    }
    std::size_t tp = 0;
    std::size_t tn = 0;
    for (const auto& id : s.train_ids) (labels[id] ? tp : tn) += 1;
    if (tp == 0 || tn < tp) continue; // negative-majority training sides only
    ++trials;
    const auto b = balance_training(s, labels, rng.next_u64());
    std::size_t bp = 0;
    for (const auto& id : b.train_ids) bp += labels[id];
    if (2 * bp != b.train_ids.size()) ++bad_prevalence;
    std::multiset<std::string> before;
    for (const auto& k : keys) before.insert(k.id);
    std::multiset<std::string> after(b.train_ids.begin(), b.train_ids.end());
    after.insert(b.validation_ids.begin(), b.validation_ids.end());
    if (before != after) ++bad_conservation;
  }
  return {bad_prevalence == 0 && bad_conservation == 0,
          std::to_string(trials) + " trials, prevalence != 0.5: " + std::to_string(bad_prevalence) +
              ", conservation failures: " + std::to_string(bad_conservation)};
}

// --- end to end ------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

PipelineConfig vitals_config(bool shifted, const std::string& dir) {
  PipelineConfig c;
  c.model_kind = ModelKind::Vitals;
  c.seeds = {1, 2, 3, 4, 5};
  c.classifier = "all";
  c.output_dir = oracle::scratch_dir(dir).string();
  c.synth.n_records = 2000;
  c.synth.prevalence = 0.4;
  c.synth.seed = 1;
  // heart rate record mean: between std 6, within std 8 over 16 samples -> sigma = sqrt(40)
  c.synth.vitals.heart_rate = {80.0, 80.0, 6.0, 6.0, 8.0};
  if (shifted) c.synth.vitals.heart_rate.mean_positive = 80.0 + 2.0 * std::sqrt(40.0);
  return c;
}

PipelineConfig notes_config(const std::string& dir) {
  PipelineConfig c;
  c.model_kind = ModelKind::Notes;
  c.seeds = {1};
  c.classifier = "all";
  c.output_dir = oracle::scratch_dir(dir).string();
  c.synth.n_records = 2000;
  c.synth.prevalence = 0.3;
  c.synth.seed = 1;
  c.synth.notes.marker_boost = 1.0;
  return c;
}

PipelineResult last_vitals;
PipelineResult last_notes;

Outcome e2e_vitals() {
  auto pos = vitals_config(true, "acceptance_vitals");
  const double target = analytic_auc_target(pos.synth);
  run_synth(pos);
  last_vitals = run_pipeline(pos);
  double mean = 0.0;
  std::string per_seed;
  for (const auto& run : last_vitals.runs) {
    mean += run.reports.at("svm").auc / static_cast<double>(last_vitals.runs.size());
    per_seed += fmt(" %.4f", run.reports.at("svm").auc);
  }

  auto null = vitals_config(false, "acceptance_vitals_null");
  null.classifier = "svm";
  run_synth(null);
  const auto null_result = run_pipeline(null);
  bool null_ok = true;
  std::string null_seed;
  for (const auto& run : null_result.runs) {
    const double a = run.reports.at("svm").auc;
    null_ok = null_ok && a >= 0.45 && a <= 0.55;
    null_seed += fmt(" %.4f", a);
  }
  return {mean >= 0.85 && null_ok, "target " + fmt("%.4f", target) + ", SVM AUC per seed" + per_seed + ", mean " +
                                       fmt("%.4f", mean) + "; null per seed" + null_seed};
}

Outcome e2e_notes() {
  auto a = notes_config("acceptance_notes");
  run_synth(a);
  last_notes = run_pipeline(a);
  const double svm_auc = last_notes.runs.at(0).reports.at("svm").auc;
  auto b = notes_config("acceptance_notes_rerun");
  run_synth(b);
  run_pipeline(b);
  const bool identical = slurp(fs::path(a.output_dir) / "summary.json") == slurp(fs::path(b.output_dir) / "summary.json");
  return {svm_auc >= 0.85 && identical,
          "2000 documents, SVM AUC " + fmt("%.4f", svm_auc) + ", rerun summary byte-identical: " +
              (identical ? "yes" : "no")};
}

Outcome structural_parity() {
  bool ok = true;
  std::string detail;
  for (const auto& [kind, dir] : {std::pair<std::string, std::string>{"vitals", "acceptance_vitals"},
                                  {"notes", "acceptance_notes"}}) {
    const fs::path out = fs::path(CPML_TEST_TMP) / dir;
    if (!fs::exists(out / "summary.json")) return {false, "missing " + (out / "summary.json").string()};
    const auto doc = nlohmann::json::parse(slurp(out / "summary.json"));
    ok = ok && doc.at("model_kind") == kind;
    for (const auto& run : doc.at("runs")) {
      const auto& reports = run.at("reports");
      ok = ok && reports.size() == 3;
      for (const std::string type : {"svm", "adaboost", "qda"}) {
        ok = ok && reports.contains(type) && reports.at(type).at("model_type") == type &&
             reports.at(type).contains("accuracy") && reports.at(type).contains("auc");
        const fs::path seed_dir = out / ("seed_" + std::to_string(run.at("seed").get<std::uint64_t>()));
        ok = ok && fs::exists(seed_dir / ("roc_" + type + ".csv"));
      }
    }
    const auto& first = doc.at("runs").at(0).at("reports");
    detail += kind + ":";
    for (const std::string type : {"svm", "adaboost", "qda"})
      detail += " " + type + " acc " + fmt("%.3f", first.at(type).at("accuracy").get<double>()) + " auc " +
                fmt("%.3f", first.at(type).at("auc").get<double>());
    detail += "; ";
  }
  return {ok, detail + "three reports per kind with model_type/accuracy/auc"};
}

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"auc_equals_mann_whitney", 10, auc_oracle},
      {"pls_first_component_and_orthogonality", 5, pls_oracle},
      {"svm_matches_brute_force_qp", 60, svm_oracle},
      {"qda_closed_form_boundary", 0, qda_closed_form},
      {"adaboost_boosting_theorem", 0, adaboost_theorem},
      {"gold_staging_sweep", 0, staging_sweep},
      {"prevalence_adjustment", 0, balancing_trials},
      {"e2e_synthetic_vitals", 120, e2e_vitals},
      {"e2e_synthetic_notes", 180, e2e_notes},
      {"structural_parity_three_reports", 0, structural_parity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.time_limit == 0 || secs < c.time_limit;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " (" << fmt("%.2f", secs) << " s"
              << (c.time_limit > 0 ? ", limit " + fmt("%.0f", c.time_limit) + " s" : std::string()) << ")"
              << std::endl;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
