// Copyright 2026 The dpmean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpmean/esthd_approx.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dpmean/errors.h"
#include "dpmean/est1d.h"
#include "dpmean/synthetic.h"
#include "gtest/gtest.h"

namespace dpmean {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

TEST(CoarseEstimateHdTest, OneDimensionMatchesRangeEstimator) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.3}, 4.0);
  const PersonDataset data = SamplePersonMeans(spec, 800, 100, Seed{1});
  const PrivacyBudget budget{kInf, 1e-6};
  const CoarseHdResult hd =
      CoarseEstimateHd(data, budget, 1.6, 4.0, 4.0, CoarseMode::kBasic, Seed{2});
  const CoarseResult one =
      RangeEstimator(data, budget, 1.6, 4.0, 4.0, Seed{2});
  EXPECT_EQ(hd.center[0], one.mu_coarse);
  EXPECT_EQ(hd.coordinate_r, 1.6);
}

TEST(CoarseEstimateHdTest, NoiselessTwoDimensions) {
  const std::size_t n = 100;
  Vector means;
  for (std::size_t i = 0; i < n; ++i) {
    means.push_back(0.4);
    means.push_back(-0.4);
  }
  const PersonDataset data = PersonDataset::FromPersonMeans(n, 100, 2, means);
  const double r = 2.0;
  const CoarseHdResult hd = CoarseEstimateHd(
      data, PrivacyBudget{kInf, 1e-6}, r, 4.0, 4.0, CoarseMode::kAuto, Seed{1});
  const double r_coord = r / std::sqrt(2.0);
  EXPECT_LE(std::abs(hd.center[0] - 0.4), r_coord);
  EXPECT_LE(std::abs(hd.center[1] + 0.4), r_coord);
  EXPECT_EQ(hd.mode_used, CoarseMode::kBasic);
}

TEST(CoarseEstimateHdTest, ThreeDimensionsWithinR) {
  const Vector mu{0.3, -0.2, 0.5};
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian(mu, 4.0);
  const double r = 16.0 * std::sqrt(3.0 / 100.0);
  int hits = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const PersonDataset data = SamplePersonMeans(spec, 3000, 100, Seed{s});
    const CoarseHdResult hd =
        CoarseEstimateHd(data, PrivacyBudget{1.0, 1e-6}, r, 4.0, 4.0,
                         CoarseMode::kAuto, Seed{500 + s});
    if (Distance2(hd.center, mu) < r) ++hits;
  }
  EXPECT_GE(hits, 90);
}

TEST(CoarseEstimateHdTest, ModesAndPreconditions) {
  const PersonDataset data = PersonDataset::FromPersonMeans(
      200, 100, 4, Vector(800, 0.0));
  EXPECT_THROW(CoarseEstimateHd(data, PrivacyBudget{1.0, 0.0}, 3.2, 4.0, 4.0,
                                CoarseMode::kBasic, Seed{1}),
               ModeError);
  // 16^(1/4) sqrt(4/100) = 0.4.
  EXPECT_THROW(CoarseEstimateHd(data, PrivacyBudget{1.0, 1e-6}, 0.4, 4.0, 4.0,
                                CoarseMode::kBasic, Seed{1}),
               ParameterError);
  // eps0 = 200 / sqrt(6 * 4 * ln 2e6) > 1 cannot use advanced composition.
  EXPECT_THROW(CoarseEstimateHd(data, PrivacyBudget{200.0, 1e-6}, 3.2, 4.0,
                                4.0, CoarseMode::kAdvanced, Seed{1}),
               ModeError);
  const CoarseHdResult basic = CoarseEstimateHd(
      data, PrivacyBudget{1.0, 1e-6}, 3.2, 4.0, 4.0, CoarseMode::kBasic,
      Seed{1});
  EXPECT_DOUBLE_EQ(basic.coordinate_epsilon, 0.25);
  EXPECT_DOUBLE_EQ(basic.coordinate_delta, 0.25e-6);
  EXPECT_EQ(ParseCoarseMode("advanced"), CoarseMode::kAdvanced);
  EXPECT_THROW(ParseCoarseMode("fancy"), ConfigError);
}

TEST(ClipAndNoiseTest, Limits) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.3, -0.1}, 4.0);
  const PersonDataset data = SampleDataset(spec, 30, 8, Seed{1});
  const Vector exact =
      ClipAndNoise(data, PrivacyBudget{kInf, 1e-6}, ClipBall{{0, 0}, 1e9},
                   Seed{2});
  const Vector grand = data.GrandMean();
  EXPECT_NEAR(exact[0], grand[0], 1e-12);
  EXPECT_NEAR(exact[1], grand[1], 1e-12);
  const Vector center =
      ClipAndNoise(data, PrivacyBudget{kInf, 1e-6}, ClipBall{{1, 2}, 0.0},
                   Seed{2});
  EXPECT_EQ(center, (Vector{1, 2}));
  EXPECT_THROW(ClipAndNoise(data, PrivacyBudget{1.0, 0.0},
                            ClipBall{{0, 0}, 1.0}, Seed{2}),
               ModeError);
}

TEST(ClipAndNoiseTest, StddevFormula) {
  const double n = 1000, d = 4, rho = 0.5;
  const PrivacyBudget b{0.5, 1e-6};
  const double printed =
      2.0 * std::sqrt(d) * rho * std::sqrt(2.0 * std::log(4.0 / 1e-6)) /
      (n * 0.5);
  EXPECT_NEAR(ClipAndNoiseStddev(1000, 4, rho, b, false), printed, 1e-15);
  EXPECT_NEAR(ClipAndNoiseStddev(1000, 4, rho, b, true), printed / 2.0,
              1e-15);
}

TEST(ClipAndNoiseTest, SensitivityWitnessAndRandomNeighbors) {
  const std::size_t n = 50, d = 3;
  const ClipBall ball{{0.1, -0.2, 0.3}, 0.8};
  Vector a(n * d, 0.0), b;
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < n; ++i) a[i * d + c] = ball.center[c];
  }
  b = a;
  // Antipodal clipped points along e_1.
  a[0] = ball.center[0] - 100.0;
  b[0] = ball.center[0] + 100.0;
  const Vector ma = ClippedMean(PersonDataset::FromPersonMeans(n, 10, d, a), ball);
  const Vector mb = ClippedMean(PersonDataset::FromPersonMeans(n, 10, d, b), ball);
  EXPECT_NEAR(Distance2(ma, mb), 2.0 * ball.radius / n, 1e-15);

  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(0.0, 1.5);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int t = 0; t < 10000; ++t) {
    Vector x(n * d);
    for (double& v : x) v = normal(gen);
    Vector y = x;
    const std::size_t i = pick(gen);
    for (std::size_t c = 0; c < d; ++c) y[i * d + c] = 4.0 * normal(gen);
    const double shift = Distance2(
        ClippedMean(PersonDataset::FromPersonMeans(n, 10, d, x), ball),
        ClippedMean(PersonDataset::FromPersonMeans(n, 10, d, y), ball));
    ASSERT_LE(shift, 2.0 * ball.radius / n * (1 + 1e-12));
  }
}

TEST(SingleRoundRhoTest, Example) {
  const double n = 1e5, m = 100, d = 4, eps = 1, delta = 1e-6, k = 4, c0 = 4;
  const double oracle =
      c0 * (std::sqrt(d * std::log(m) / m) +
            std::pow(std::sqrt(d), (k - 1) / k) * std::pow(eps, 1 / k) *
                std::pow(n, 1 / k) /
                (std::pow(m, 1 - 1 / k) *
                 std::pow(std::sqrt(std::log(1 / delta)), 1 / k)));
  EXPECT_NEAR(oracle, 4.4412716, 1e-7);
  EXPECT_NEAR(SingleRoundRho(n, m, d, eps, delta, k, c0), 4.4412716, 1e-7);
}

TEST(TwoRoundConfigTest, RhoOneDominatesRhoTwo) {
  for (double n : {100.0, 1e4, 1e6})
    for (double m : {4.0, 100.0, 1e4})
      for (double d : {1.0, 2.0, 8.0, 64.0})
        for (double eps : {0.1, 1.0, 10.0})
          for (double k : {3.0, 4.0, 8.0}) {
            const TwoRoundConfig c =
                TwoRoundConfig::Compute(n, m, d, eps, 1e-6, k, 1.0, 1.0);
            EXPECT_GE(c.rho1, c.rho2);
            EXPECT_GE(c.rho2, std::sqrt(d / m) * (1 - 1e-15));
          }
}

TEST(TwoRoundConfigTest, PrintedFormula) {
  const double n = 3000, m = 100, d = 4, eps = 1, delta = 1e-6, k = 4;
  const double common = std::pow(n, 1 / k) * std::pow(eps, 1 / k) /
                        (std::pow(std::log(1 / delta), 1 / (2 * k)) *
                         std::pow(m, 1 - 1 / k));
  const TwoRoundConfig c =
      TwoRoundConfig::Compute(n, m, d, eps, delta, k, 16.0, 4.0);
  EXPECT_NEAR(c.rho1_base,
              std::max(std::sqrt(d / m),
                       common * std::pow(d, 0.5 - 1 / (2 * k))),
              1e-12);
  EXPECT_NEAR(c.rho2_base,
              std::max(std::sqrt(d / m), common * std::pow(d, 0.5 - 1 / k)),
              1e-12);
  EXPECT_DOUBLE_EQ(c.rho1, 16.0 * c.rho1_base);
  EXPECT_DOUBLE_EQ(c.rho2, 4.0 * c.rho2_base);
}

TEST(EstimateTwoRoundTest, LedgerSumsExactly) {
  const SyntheticSpec spec =
      SyntheticSpec::ScaledGaussian({0.3, -0.2, 0.1, 0.0}, 4.0);
  const PersonDataset data = SamplePersonMeans(spec, 3001, 100, Seed{1});
  const PrivacyBudget budget{1.0, 1e-6};
  const EstimateReport r = EstimateTwoRound(
      data, budget, ProblemParams{4.0, 0.4, 0.1, 2.0}, Seed{2});
  EXPECT_EQ(r.consumed().epsilon, budget.epsilon);
  EXPECT_EQ(r.consumed().delta, budget.delta);
  EXPECT_EQ(r.ledger.entries.size(), 3u);
  EXPECT_GE(r.scalar("rho1"), r.scalar("rho2"));
  EXPECT_EQ(r.scalar("dropped_people"), 1.0);
  EXPECT_EQ(r.vectors.at("u1").size(), 4u);
  EXPECT_EQ(r.vectors.at("u2").size(), 4u);
}

TEST(EstimateTwoRoundTest, NoiselessZeroVariance) {
  const Vector mu{0.3, -0.2, 0.1, 0.0};
  const std::size_t n = 300;
  Vector means;
  for (std::size_t i = 0; i < n; ++i) means.insert(means.end(), mu.begin(), mu.end());
  const PersonDataset data = PersonDataset::FromPersonMeans(n, 100, 4, means);
  const EstimateReport r = EstimateTwoRound(
      data, PrivacyBudget{kInf, 1e-6}, ProblemParams{4.0, 0.4, 0.1, 2.0},
      Seed{3});
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(r.estimate[c], mu[c], 1e-12);
}

TEST(EstimateSingleRoundTest, ZeroVarianceAndLedger) {
  const Vector mu{0.3, -0.2};
  const std::size_t n = 2000;
  Vector means;
  for (std::size_t i = 0; i < n; ++i) means.insert(means.end(), mu.begin(), mu.end());
  const PersonDataset data = PersonDataset::FromPersonMeans(n, 100, 2, means);
  const PrivacyBudget budget{1.0, 1e-6};
  const EstimateReport r = EstimateSingleRound(
      data, budget, ProblemParams{4.0, 0.4, 0.1, 2.0}, Seed{4});
  EXPECT_LE(Distance2(r.estimate, mu), 6.0 * r.scalar("noise_stddev") * 2.0);
  EXPECT_EQ(r.consumed().epsilon, 1.0);
  EXPECT_EQ(r.consumed().delta, 1e-6);
}

TEST(EstimateSingleRoundTest, OneDimensionAgreesWithEst1d) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.3}, 4.0);
  int both = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const PersonDataset data = SamplePersonMeans(spec, 8192, 100, Seed{s});
    const ProblemParams params{4.0, 0.15, 0.1, 2.0};
    const EstimateReport single = EstimateSingleRound(
        data, PrivacyBudget{1.0, 1e-6}, params, Seed{100 + s});
    const EstimateReport one =
        EstimateMean1d(data, PrivacyBudget{1.0, 0.0}, params, Seed{200 + s});
    if (std::abs(single.estimate[0] - 0.3) <= 0.15 &&
        std::abs(one.estimate[0] - 0.3) <= 0.15) {
      ++both;
    }
  }
  EXPECT_GE(both, 18);
}

TEST(EstimateTwoRoundTest, NotMuchWorseThanSingleRound) {
  const Vector mu{0.3, -0.2, 0.1, 0.0};
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian(mu, 4.0);
  const ProblemParams params{4.0, 0.4, 0.1, 2.0};
  std::vector<double> two, one;
  // n = 4096 puts the median error near m^(-1/2) d^(-1/(2k)) = 0.084. For
  // much larger n the single round, which reuses every person, pulls ahead.
  for (std::uint64_t s = 0; s < 100; ++s) {
    const PersonDataset data = SamplePersonMeans(spec, 4096, 100, Seed{s});
    two.push_back(Distance2(
        EstimateTwoRound(data, PrivacyBudget{1, 1e-6}, params, Seed{s})
            .estimate,
        mu));
    one.push_back(Distance2(
        EstimateSingleRound(data, PrivacyBudget{1, 1e-6}, params, Seed{s})
            .estimate,
        mu));
  }
  RecordProperty("two_round_median", std::to_string(Median(two)));
  RecordProperty("single_round_median", std::to_string(Median(one)));
  EXPECT_LE(Median(two), 1.5 * Median(one));
}

}  // namespace
}  // namespace dpmean
