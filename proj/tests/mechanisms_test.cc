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

#include "dpmean/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dpmean/errors.h"
#include "gtest/gtest.h"

namespace dpmean {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(HistogramSpecTest, CoversRangeWithUnitBuckets) {
  const HistogramSpec spec = HistogramSpec::Make(1.0, 1.0);
  ASSERT_EQ(spec.num_buckets, 6u);
  EXPECT_EQ(spec.left(0), -3.0);
  EXPECT_EQ(spec.right(spec.num_buckets - 1), 3.0);
  for (std::size_t b = 0; b + 1 < spec.num_buckets; ++b) {
    EXPECT_EQ(spec.right(b), spec.left(b + 1));
    EXPECT_DOUBLE_EQ(spec.right(b) - spec.left(b), 1.0);
  }
  EXPECT_EQ(spec.BucketOf(0.0), std::optional<std::size_t>(3));
  EXPECT_EQ(spec.BucketOf(-1e-300), std::optional<std::size_t>(2));
  EXPECT_EQ(spec.BucketOf(1.0), std::optional<std::size_t>(4));
  EXPECT_EQ(spec.BucketOf(3.0), std::nullopt);
  EXPECT_EQ(spec.BucketOf(-3.0), std::optional<std::size_t>(0));
  EXPECT_THROW(HistogramSpec::Make(0.0, 1.0), ParameterError);
  EXPECT_THROW(HistogramSpec::Make(1e-9, 1.0), ScaleError);
}

TEST(HistogramSpecTest, BoundaryPointsGoRight) {
  const HistogramSpec spec = HistogramSpec::Make(0.25, 2.0);
  for (std::size_t b = 0; b < spec.num_buckets; ++b) {
    EXPECT_EQ(spec.BucketOf(spec.left(b)), std::optional<std::size_t>(b));
  }
}

TEST(LaplaceTest, RejectsNonPositiveScale) {
  EXPECT_THROW(LaplaceNoise(0.0, Seed{1}), ParameterError);
  EXPECT_THROW(LaplaceNoise(-1.0, Seed{1}), ParameterError);
}

TEST(LaplaceTest, TailMeanAndSpread) {
  const int n = 1000000;
  int tail3 = 0;
  double sum = 0.0;
  Rng rng(Seed{2});
  for (int i = 0; i < n; ++i) {
    const double x = rng.Laplace();
    sum += x;
    if (std::abs(x) >= 3.0) ++tail3;
  }
  EXPECT_LE(static_cast<double>(tail3) / n, 0.0498 * 1.1);
  EXPECT_NEAR(sum / n, 0.0, 0.01);

  // b = 2 through the public entry point: stddev 2 sqrt(2).
  double ss = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double x = LaplaceNoise(2.0, Seed{static_cast<std::uint64_t>(i)});
    ss += x * x;
  }
  EXPECT_NEAR(std::sqrt(ss / m), 2.0 * std::sqrt(2.0), 0.02 * 2.0 * std::sqrt(2.0));
}

TEST(GaussianTest, StddevFormula) {
  // sqrt(2 ln(2 / 0.01)) = sqrt(2 ln 200).
  const double oracle = std::sqrt(2.0 * std::log(200.0));
  EXPECT_NEAR(oracle, 3.2552473, 1e-7);
  EXPECT_NEAR(GaussianStddev(1.0, PrivacyBudget{1.0, 0.01}), 3.2552473, 1e-7);
  EXPECT_EQ(GaussianStddev(0.0, PrivacyBudget{1.0, 0.01}), 0.0);
  EXPECT_THROW(GaussianStddev(1.0, PrivacyBudget{1.0, 0.0}), ModeError);
}

TEST(GaussianTest, MechanismShapeAndSpread) {
  const Vector value{1.0, 2.0, 3.0};
  const PrivacyBudget budget{1.0, 0.01};
  EXPECT_EQ(GaussianMechanism(value, 0.0, budget, Seed{1}), value);
  const Vector noisy = GaussianMechanism(value, 1.0, budget, Seed{1});
  ASSERT_EQ(noisy.size(), 3u);
  EXPECT_NE(noisy[0] - 1.0, noisy[1] - 2.0);

  const Vector zeros(1000, 0.0);
  double ss = 0.0;
  int count = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    for (double x : GaussianMechanism(zeros, 1.0, budget,
                                      Seed{static_cast<std::uint64_t>(rep)})) {
      ss += x * x;
      ++count;
    }
  }
  EXPECT_NEAR(std::sqrt(ss / count) / 3.2552473, 1.0, 0.01);
}

TEST(PrivateHistogramTest, NoiselessLimit) {
  const HistogramSpec spec = HistogramSpec::Make(1.0, 1.0);
  const std::vector<double> points{0.1, 0.2, 1.5};
  const NoisyHistogram h =
      PrivateHistogram(points, spec, PrivacyBudget{kInf, 0.0}, Seed{1});
  ASSERT_EQ(h.counts.size(), spec.num_buckets);
  for (std::size_t b = 0; b < spec.num_buckets; ++b) {
    const double expected = spec.left(b) == 0.0 ? 2.0
                            : spec.left(b) == 1.0 ? 1.0
                                                  : 0.0;
    EXPECT_EQ(h.counts[b], expected);
    EXPECT_TRUE(h.released[b]);
  }
}

TEST(PrivateHistogramTest, DropsPointsOutsideGrid) {
  const HistogramSpec spec = HistogramSpec::Make(1.0, 1.0);
  const std::vector<double> points{0.5, 3.0, -7.0};
  const NoisyHistogram h =
      PrivateHistogram(points, spec, PrivacyBudget{kInf, 0.0}, Seed{1});
  EXPECT_EQ(h.dropped, 2u);
}

TEST(PrivateHistogramTest, PureModeUnionBound) {
  const double threshold = 2.0 * std::log(2.0 * 20 * 1e4);
  EXPECT_NEAR(threshold, 25.798, 1e-3);
  const HistogramSpec spec = HistogramSpec::Make(1.0, 8.0);
  ASSERT_EQ(spec.num_buckets, 20u);
  std::vector<double> points;
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int i = 0; i < 300; ++i) points.push_back(normal(gen));
  const auto exact = ExactCounts(points, spec);
  int within = 0;
  const int reps = 10000;
  for (int rep = 0; rep < reps; ++rep) {
    const NoisyHistogram h = PrivateHistogram(
        points, spec, PrivacyBudget{1.0, 0.0},
        Seed{static_cast<std::uint64_t>(rep)});
    double worst = 0.0;
    for (std::size_t b = 0; b < spec.num_buckets; ++b) {
      worst = std::max(worst, std::abs(h.counts[b] - exact[b]));
    }
    if (worst <= threshold) ++within;
  }
  EXPECT_GE(within, 0.99 * reps);
}

TEST(PrivateHistogramTest, StabilityNeverReleasesEmptyBuckets) {
  const PrivacyBudget budget{1.0, 1e-6};
  EXPECT_NEAR(StabilityThreshold(budget), 30.0173, 1e-4);
  const HistogramSpec spec = HistogramSpec::Make(1.0, 1.0);
  const std::vector<double> points{0.5};
  int releases = 0;
  for (int rep = 0; rep < 100000; ++rep) {
    const NoisyHistogram h = PrivateHistogram(
        points, spec, budget, Seed{static_cast<std::uint64_t>(rep)});
    for (std::size_t b = 0; b < spec.num_buckets; ++b) {
      if (h.released[b]) ++releases;
      if (!h.released[b]) EXPECT_EQ(h.counts[b], 0.0);
    }
  }
  EXPECT_EQ(releases, 0);
}

TEST(PrivateHistogramTest, CsvHeader) {
  const HistogramSpec spec = HistogramSpec::Make(1.0, 1.0);
  const NoisyHistogram h =
      PrivateHistogram(std::vector<double>{0.5}, spec, PrivacyBudget{kInf, 0},
                       Seed{1});
  const std::string csv = h.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "bucket_left,bucket_right,noisy_count,released");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(ExponentialMechanismTest, EqualScoresAreUniform) {
  const std::vector<double> scores(4, 1.0);
  std::vector<int> hits(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    ++hits[ExponentialMechanism(scores, 1.0, 1.0,
                                Seed{static_cast<std::uint64_t>(i)})];
  }
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / n, 0.25, 0.01);
}

TEST(ExponentialMechanismTest, TwoCandidateRatio) {
  // P[high] / P[low] = exp(eps * s / 2) = e for eps = 1, s = 2.
  const std::vector<double> scores{0.0, 2.0};
  int high = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    high += ExponentialMechanism(scores, 1.0, 1.0,
                                 Seed{static_cast<std::uint64_t>(i)}) == 1;
  }
  const double ratio = static_cast<double>(high) / (n - high);
  EXPECT_NEAR(ratio / std::exp(1.0), 1.0, 0.03);
}

TEST(ExponentialMechanismTest, LimitsAndErrors) {
  const std::vector<double> scores{0.0, 100.0, 3.0};
  std::vector<int> hits(3, 0);
  for (int i = 0; i < 30000; ++i) {
    ++hits[ExponentialMechanism(scores, 1.0, 0.0,
                                Seed{static_cast<std::uint64_t>(i)})];
  }
  for (int h : hits) EXPECT_NEAR(h / 30000.0, 1.0 / 3.0, 0.015);
  EXPECT_EQ(ExponentialMechanism(scores, 1.0, kInf, Seed{1}), 1u);
  EXPECT_EQ(ExponentialMechanism(std::vector<double>{2.0, 2.0}, 1.0, kInf,
                                 Seed{1}),
            0u);
  EXPECT_THROW(ExponentialMechanism(std::vector<double>{}, 1.0, 1.0, Seed{1}),
               InputError);
  EXPECT_THROW(ExponentialSampler(0.0, 1.0, Seed{1}), ParameterError);
}

TEST(LedgerTest, BasicComposition) {
  BudgetLedger ledger;
  ledger.Add("a", 0.5, 0.0);
  ledger.Add("b", 0.5, 0.0);
  const PrivacyBudget total = LedgerTotal(ledger);
  EXPECT_DOUBLE_EQ(total.epsilon, 1.0);
  EXPECT_EQ(total.delta, 0.0);
  const PrivacyBudget empty = LedgerTotal(BudgetLedger{});
  EXPECT_EQ(empty.epsilon, 0.0);
  EXPECT_EQ(empty.delta, 0.0);
}

TEST(LedgerTest, ParallelPartitions) {
  BudgetLedger ledger;
  ledger.Add("coarse x1", 0.5, 0.0, 0);
  ledger.Add("coarse x2", 0.5, 0.0, 0);
  ledger.Add("fine", 1.0, 0.0, 1);
  EXPECT_DOUBLE_EQ(LedgerTotal(ledger).epsilon, 1.0);
}

TEST(LedgerTest, AdvancedComposition) {
  // 0.1 sqrt(6 * 100 * ln 1e6) = 9.1045628.
  const double oracle = 0.1 * std::sqrt(600.0 * std::log(1e6));
  EXPECT_NEAR(oracle, 9.1045628, 1e-7);
  BudgetLedger ledger;
  ledger.mode = CompositionMode::kAdvanced;
  ledger.delta0 = 1e-6;
  for (int i = 0; i < 100; ++i) ledger.Add("step", 0.1, 0.0);
  const PrivacyBudget total = LedgerTotal(ledger);
  EXPECT_NEAR(total.epsilon, 9.1045628, 1e-7);
  EXPECT_DOUBLE_EQ(total.delta, 1e-6);

  ledger.Add("odd", 0.2, 0.0);
  EXPECT_THROW(LedgerTotal(ledger), ModeError);
}

TEST(LedgerTest, OrderInvariant) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BudgetLedger ledger;
  for (int i = 0; i < 20; ++i) ledger.Add("x", u(gen), u(gen) * 1e-6, i % 3);
  const PrivacyBudget before = LedgerTotal(ledger);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(ledger.entries.begin(), ledger.entries.end(), gen);
    const PrivacyBudget after = LedgerTotal(ledger);
    EXPECT_NEAR(after.epsilon, before.epsilon, 1e-12);
    EXPECT_NEAR(after.delta, before.delta, 1e-18);
  }
}

}  // namespace
}  // namespace dpmean
