#include <doctest.h>

#include "cpml/error.hpp"
#include "cpml/rng.hpp"
#include "cpml/vital_features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace cpml;

TEST_CASE("summary_stats") {
  const std::vector<double> a{12, 18, 14, 16, 20};
  const auto s = summary_stats(a);
  CHECK(s.max == 20);
  CHECK(s.min == 12);
  CHECK(s.mean == 16);
  CHECK(s.median == 16);
  CHECK(s.std == doctest::Approx(3.16227766016838).epsilon(1e-12));

  const std::vector<double> one{7};
  const auto s1 = summary_stats(one);
  CHECK((s1.max == 7 && s1.min == 7 && s1.mean == 7 && s1.median == 7 && s1.std == 0));

  const std::vector<double> even{1, 2, 3, 4};
  CHECK(summary_stats(even).median == 2.5);
  CHECK_THROWS_AS(summary_stats(std::vector<double>{}), Error);
}

TEST_CASE("stage_sample: staging table") {
  CHECK(stage_sample(SignalKind::HeartRate, 115) == Stage::Severe);
  CHECK(stage_sample(SignalKind::RespRate, 10) == Stage::Low);
  CHECK(stage_sample(SignalKind::SpO2, 78) == Stage::VerySevere);
  // shared endpoints go to the more severe stage
  CHECK(stage_sample(SignalKind::RespRate, 18) == Stage::High);
  CHECK(stage_sample(SignalKind::HeartRate, 90) == Stage::Mild);
  CHECK(stage_sample(SignalKind::SpO2, 92) == Stage::Mild);
  CHECK(stage_sample(SignalKind::RespRate, 12) == Stage::Normal);
  CHECK(stage_sample(SignalKind::RespRate, 20) == Stage::Abnormal);
  CHECK(stage_sample(SignalKind::SpO2, 80) == Stage::VerySevere);
}

TEST_CASE("bucket_fractions") {
  const std::vector<double> hr{85, 85, 95, 125};
  CHECK(bucket_fractions(SignalKind::HeartRate, hr) == std::vector<double>{0.5, 0.25, 0, 0, 0.25});
  const std::vector<double> rr{15, 15, 15};
  CHECK(bucket_fractions(SignalKind::RespRate, rr) == std::vector<double>{1, 0, 0, 0});
  const std::vector<double> spo2{95, 91, 89, 84, 79};
  CHECK(bucket_fractions(SignalKind::SpO2, spo2) == std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2});
  CHECK_THROWS_AS(bucket_fractions(SignalKind::SpO2, std::vector<double>{}), Error);
}

TEST_CASE("featurize_record layout") {
  const VitalRecord constant{"c", 0, std::vector<double>(4, 80.0), std::vector<double>(4, 96.0),
                             std::vector<double>(4, 15.0)};
  const auto v = featurize_record(constant);
  CHECK(v.size() == 29);
  const std::vector<double> expected{80, 80, 80, 80, 0, 15, 15, 15, 15, 0, 96, 96, 96, 96, 0,
                                     1,  0,  0,  0,  0, 1,  0,  0,  0,  1, 0,  0,  0,  0};
  CHECK(std::vector<double>(v.begin(), v.end()) == expected);

  // composition of the worked examples above
  const VitalRecord mixed{"m", 1, {85, 85, 95, 125}, {95, 91, 89, 84, 79}, {15, 15, 15}};
  const auto w = featurize_record(mixed);
  const auto hr = summary_stats(mixed.heart_rate);
  CHECK(w[0] == hr.max);
  CHECK(w[4] == hr.std);
  CHECK(std::vector<double>(w.begin() + 15, w.begin() + 20) == std::vector<double>{0.5, 0.25, 0, 0, 0.25});
  CHECK(std::vector<double>(w.begin() + 20, w.begin() + 24) == std::vector<double>{1, 0, 0, 0});
  CHECK(std::vector<double>(w.begin() + 24, w.end()) == std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2});

  CHECK(vital_feature_names()[0] == "hr_max");
  CHECK(vital_feature_names()[5] == "rr_max");
  CHECK(vital_feature_names()[15] == "hr_frac_normal");
  CHECK(vital_feature_names()[21] == "rr_frac_low");
  CHECK(vital_feature_names()[28] == "spo2_frac_very_severe");

  const VitalRecord empty_rr{"e", 0, {80}, {95}, {}};
  CHECK_THROWS_WITH_AS(featurize_record(empty_rr), doctest::Contains("RR"), Error);
}

TEST_CASE("staging is a partition over a fine grid") {
  for (SignalKind kind : {SignalKind::HeartRate, SignalKind::RespRate, SignalKind::SpO2}) {
    const auto stages = stages_of(kind);
    for (int i = 0; i <= 300 * 100; ++i) {
      const double v = i / 100.0;
      const Stage s = stage_sample(kind, v);
      CHECK(std::count(stages.begin(), stages.end(), s) == 1);
    }
  }
}

TEST_CASE("random series: fractions sum to 1 and stats match a sort oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> series(1 + rng.below(50));
    for (auto& v : series) v = rng.uniform01() * 200.0;
    for (SignalKind kind : {SignalKind::HeartRate, SignalKind::RespRate, SignalKind::SpO2}) {
      const auto f = bucket_fractions(kind, series);
      const double sum = std::accumulate(f.begin(), f.end(), 0.0);
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      for (double x : f) CHECK((x >= 0.0 && x <= 1.0));
    }
    const auto s = summary_stats(series);
    auto sorted = series;
    std::sort(sorted.begin(), sorted.end());
    CHECK(s.max == sorted.back());
    CHECK(s.min == sorted.front());
    const std::size_t n = sorted.size();
    CHECK(s.median == (n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2));
    CHECK((s.min <= s.mean && s.mean <= s.max && s.min <= s.median && s.median <= s.max && s.std >= 0));

    auto permuted = series;
    rng.shuffle(permuted);
    const auto p = summary_stats(permuted);
    CHECK((p.max == s.max && p.min == s.min && p.mean == s.mean && p.median == s.median && p.std == s.std));
  }
}

TEST_CASE("feature table round-trips and plausibility report flags SpO2 > 100") {
  const std::vector<VitalRecord> recs{{"a", 1, {80, 90}, {101, 95}, {14, 22}}, {"b", 0, {70}, {97}, {16}}};
  const auto table = featurize_records(recs);
  std::stringstream buf;
  write_feature_table(buf, table);
  const auto back = read_feature_table(buf, "features.csv");
  CHECK(back.record_ids == table.record_ids);
  CHECK(back.labels == table.labels);
  CHECK(back.features == table.features);

  const auto issues = plausibility_report(recs);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].record_id == "a");
  CHECK(issues[0].value == 101);
}
