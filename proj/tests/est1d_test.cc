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

#include "dpmean/est1d.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dpmean/errors.h"
#include "dpmean/synthetic.h"
#include "gtest/gtest.h"

namespace dpmean {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PersonDataset Constant1d(std::size_t n, std::size_t m, double value) {
  return PersonDataset(n, m, 1, Vector(n * m, value));
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2]
                      : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

TEST(RangeEstimatorTest, NoiselessBucketMidpoint) {
  const CoarseResult c = RangeEstimator(Constant1d(50, 16, 0.4),
                                        PrivacyBudget{kInf, 0.0}, 1.0, 2.0,
                                        4.0, Seed{1});
  EXPECT_EQ(c.mu_coarse, 0.5);
  EXPECT_EQ(c.bucket_left, 0.0);
  EXPECT_EQ(c.bucket_right, 1.0);
  EXPECT_EQ(c.accuracy_claim, 2.0);
}

TEST(RangeEstimatorTest, TiesGoToSmallerLeftEndpoint) {
  Vector values(20 * 16);
  std::fill(values.begin(), values.begin() + 10 * 16, 1.5);
  std::fill(values.begin() + 10 * 16, values.end(), -0.5);
  const CoarseResult c = RangeEstimator(PersonDataset(20, 16, 1, values),
                                        PrivacyBudget{kInf, 0.0}, 1.0, 2.0,
                                        4.0, Seed{1});
  EXPECT_EQ(c.mu_coarse, -0.5);
}

TEST(RangeEstimatorTest, Preconditions) {
  const PersonDataset data = Constant1d(50, 16, 0.4);
  const PrivacyBudget b{1.0, 0.0};
  // 16^(1/4) / 4 = 0.5 is the lower limit.
  EXPECT_THROW(RangeEstimator(data, b, 0.5, 2.0, 4.0, Seed{1}),
               ParameterError);
  EXPECT_THROW(RangeEstimator(data, b, 2.0, 2.0, 4.0, Seed{1}),
               ParameterError);
  // r above the moment limit but sqrt(m) r < 2.
  const PersonDataset wide = Constant1d(50, 100, 0.4);
  EXPECT_THROW(RangeEstimator(wide, b, 0.19, 2.0, 8.0, Seed{1}),
               ParameterError);
  EXPECT_THROW(
      RangeEstimator(PersonDataset(2, 16, 2, Vector(64, 0.0)), b, 1.0, 2.0,
                     4.0, Seed{1}),
      InputError);
}

TEST(RangeEstimatorTest, AllSuppressedFails) {
  // Three people cannot clear a threshold near 30.
  EXPECT_THROW(RangeEstimator(Constant1d(3, 16, 0.4), PrivacyBudget{1, 1e-6},
                              1.0, 2.0, 4.0, Seed{1}),
               EstimationFailed);
}

TEST(RangeEstimatorTest, GaussianWithinTwoR) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.3}, 4.0);
  int hits = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const PersonDataset data = SamplePersonMeans(spec, 500, 100, Seed{s});
    const CoarseResult c = RangeEstimator(data, PrivacyBudget{1.0, 0.0}, 0.4,
                                          2.0, 4.0, Seed{1000 + s});
    if (std::abs(c.mu_coarse - 0.3) < 0.8) ++hits;
  }
  EXPECT_GE(hits, 190);
}

TEST(RangeEstimatorTest, HugeNoiseSmoke) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.3}, 4.0);
  int misses = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const PersonDataset data = SamplePersonMeans(spec, 100, 100, Seed{s});
    const CoarseResult c = RangeEstimator(data, PrivacyBudget{0.001, 0.0},
                                          0.4, 2.0, 4.0, Seed{s});
    if (std::abs(c.mu_coarse - 0.3) >= 0.8) ++misses;
  }
  RecordProperty("misses", misses);
}

TEST(ConcentrationCountTest, FewAveragesFarFromMean) {
  // r = 16^(1/k) / sqrt(m): at most 1/16 of the averages leave mu +- r.
  const double m = 100, k = 4;
  const double r = std::pow(16.0, 1.0 / k) / std::sqrt(m);
  for (const SyntheticSpec& spec :
       {SyntheticSpec::ScaledGaussian({0.0}, k),
        SyntheticSpec::PointMassMixture({0.0}, k, 0.02),
        SyntheticSpec::StudentT({0.0}, k, 6.0)}) {
    const double mu = DistributionMean(spec)[0];
    int good = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const Vector means = SamplePersonMeans(spec, 400, 100, Seed{s})
                               .PersonMeans();
      const auto far = std::count_if(means.begin(), means.end(),
                                     [&](double x) {
                                       return std::abs(x - mu) > r;
                                     });
      if (far <= 400 / 16) ++good;
    }
    EXPECT_GE(good, 90) << FamilyName(spec.family);
  }
}

TEST(FineEstimate1dTest, NoClipNoNoiseIsGrandMean) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.3}, 4.0);
  const PersonDataset data = SampleDataset(spec, 40, 10, Seed{1});
  CoarseResult coarse;
  coarse.mu_coarse = 0.0;
  const EstimateReport r =
      FineEstimate1d(data, PrivacyBudget{kInf, 0.0}, coarse,
                     FineConfig{1e9, 0.0}, Seed{2});
  EXPECT_NEAR(r.estimate[0], data.GrandMean()[0], 1e-12);
  EXPECT_EQ(r.scalar("laplace_scale"), 0.0);
}

TEST(FineEstimate1dTest, ConstantDataLaplaceTail) {
  const std::size_t n = 200;
  const double c = 0.25, rho = 1.0, eps = 1.0, beta = 0.05;
  const PersonDataset data = Constant1d(n, 5, c);
  CoarseResult coarse;
  coarse.mu_coarse = 0.0;
  const double limit = 2.0 * rho / (n * eps) * std::log(2.0 / beta);
  int within = 0;
  const int runs = 10000;
  for (int s = 0; s < runs; ++s) {
    const EstimateReport r =
        FineEstimate1d(data, PrivacyBudget{eps, 0.0}, coarse,
                       FineConfig{rho, 0.5}, Seed{static_cast<std::uint64_t>(s)});
    if (std::abs(r.estimate[0] - c) <= limit) ++within;
  }
  EXPECT_GE(within, (1 - beta) * runs);
}

TEST(FineEstimate1dTest, Preconditions) {
  const PersonDataset data = Constant1d(10, 5, 0.0);
  CoarseResult coarse;
  EXPECT_THROW(FineEstimate1d(data, PrivacyBudget{1, 1e-6}, coarse,
                              FineConfig{1.0, 0.0}, Seed{1}),
               ModeError);
  EXPECT_THROW(FineEstimate1d(data, PrivacyBudget{1, 0}, coarse,
                              FineConfig{1.0, 1.0}, Seed{1}),
               ParameterError);
}

TEST(SensitivityTest, TruncatedMeanShiftAtMostTwoRhoOverN) {
  const std::size_t n = 100, m = 4;
  const double center = 0.2, rho = 0.7;
  // Adversarial witness: one person moved from the lower clamp to the upper.
  Vector values(n * m, center);
  Vector neighbor = values;
  for (std::size_t j = 0; j < m; ++j) {
    values[j] = center - 50.0;
    neighbor[j] = center + 50.0;
  }
  const double shift =
      TruncatedMean1d(PersonDataset(n, m, 1, neighbor), center, rho) -
      TruncatedMean1d(PersonDataset(n, m, 1, values), center, rho);
  EXPECT_NEAR(shift, 2.0 * rho / n, 1e-15);

  std::mt19937_64 gen(9);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int t = 0; t < 10000; ++t) {
    Vector a(n * m);
    for (double& v : a) v = normal(gen);
    Vector b = a;
    const std::size_t i = pick(gen);
    for (std::size_t j = 0; j < m; ++j) b[i * m + j] = 5.0 * normal(gen);
    const double d =
        std::abs(TruncatedMean1d(PersonDataset(n, m, 1, a), center, rho) -
                 TruncatedMean1d(PersonDataset(n, m, 1, b), center, rho));
    ASSERT_LE(d, 2.0 * rho / n * (1 + 1e-12));
  }
}

TEST(ChooseRho1dTest, Example) {
  // 4 (sqrt(3 ln 100 / 100) + (1e4 / ln 10)^(1/4) / 100^(3/4))
  const double oracle =
      4.0 * (std::sqrt(3.0 * std::log(100.0) / 100.0) +
             std::pow(1e4 / std::log(10.0), 0.25) / std::pow(100.0, 0.75));
  EXPECT_NEAR(oracle, 2.5136167, 1e-7);
  EXPECT_NEAR(ChooseRho1d(1e4, 100, 1.0, 0.1, 4.0, 4.0), 2.5136167, 1e-7);
  EXPECT_EQ(ChooseRho1d(1e4, 100, 1.0, 0.1, 4.0, 0.0), 0.0);
  double prev = 0.0;
  for (double n = 100; n < 1e7; n *= 2) {
    const double rho = ChooseRho1d(n, 100, 1.0, 0.1, 4.0, 4.0);
    EXPECT_GT(rho, prev);
    prev = rho;
  }
}

TEST(EstimateMean1dTest, LedgerAndReportFields) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.3}, 4.0);
  const PersonDataset data = SamplePersonMeans(spec, 2000, 100, Seed{3});
  const EstimateReport r =
      EstimateMean1d(data, PrivacyBudget{1.0, 0.0},
                     ProblemParams{4.0, 0.15, 0.1, 2.0}, Seed{4});
  EXPECT_DOUBLE_EQ(r.consumed().epsilon, 1.0);
  EXPECT_EQ(r.consumed().delta, 0.0);
  EXPECT_EQ(r.ledger.entries.size(), 2u);
  EXPECT_GT(r.scalar("rho"), 0.0);
  EXPECT_EQ(r.vectors.at("mu_coarse").size(), 1u);
  EXPECT_LT(std::abs(r.estimate[0] - 0.3), 0.15);
}

TEST(EstimateMean1dTest, ZeroVarianceData) {
  const std::size_t n = 4000;
  const PersonDataset data = PersonDataset::FromPersonMeans(
      n, 100, 1, Vector(n, 0.3));
  const EstimateReport r =
      EstimateMean1d(data, PrivacyBudget{1.0, 0.0},
                     ProblemParams{4.0, 0.15, 0.1, 2.0}, Seed{5});
  // Fine noise is Laplace(2 rho / (n eps/2)); 20 scales is a 2e-9 tail.
  const double scale = r.scalar("laplace_scale");
  EXPECT_LE(std::abs(r.estimate[0] - 0.3), 20.0 * scale);
}

TEST(EstimateMean1dTest, MedianErrorShrinksWithN) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.3}, 4.0);
  double prev = kInf;
  for (std::size_t n = 1024; n <= 65536; n *= 2) {
    std::vector<double> errors;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const PersonDataset data = SamplePersonMeans(spec, n, 100, Seed{s});
      const EstimateReport r =
          EstimateMean1d(data, PrivacyBudget{1.0, 0.0},
                         ProblemParams{4.0, 0.15, 0.1, 2.0}, Seed{100 + s});
      errors.push_back(std::abs(r.estimate[0] - 0.3));
    }
    const double med = Median(errors);
    EXPECT_LT(med, prev * 1.1) << "n=" << n;
    prev = med;
  }
}

}  // namespace
}  // namespace dpmean
