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

#include "dpmean/tailbounds.h"

#include <cmath>
#include <random>

#include "dpmean/errors.h"
#include "gtest/gtest.h"

namespace dpmean {
namespace {

TailBoundQuery Query(std::size_t m, double k, std::size_t d, double t) {
  TailBoundQuery q;
  q.m = m;
  q.k = k;
  q.d = d;
  q.t = t;
  return q;
}

TEST(BoundHeavytailTest, Example) {
  const BoundValue b = BoundHeavytail(Query(100, 3, 1, 0.5));
  EXPECT_NEAR(b.polynomial_term, 8e-4, 1e-15);
  EXPECT_NEAR(b.exponential_term, std::exp(-25.0 / 12.0), 1e-15);
  EXPECT_NEAR(b.value, 0.1253145, 1e-6);
  EXPECT_EQ(b.dominant, "exponential");
  EXPECT_THROW(BoundHeavytail(Query(100, 2, 1, 0.5)), ParameterError);
}

TEST(BoundHeavytailTest, LimitAndMarkov) {
  EXPECT_LT(BoundHeavytail(Query(100, 3, 1, 1e6)).value, 1e-15);
  for (double t : {1.0, 2.0, 5.0}) {
    EXPECT_DOUBLE_EQ(BoundHeavytail(Query(1, 3, 1, t)).polynomial_term,
                     std::pow(t, -3.0));
    EXPECT_DOUBLE_EQ(BoundMarkov(3, t), std::min(1.0, std::pow(t, -3.0)));
  }
}

TEST(BoundHeavytailTest, WindowFlag) {
  const Window w = HeavytailWindow(100, 3);
  EXPECT_NEAR(w.lo, std::sqrt(std::log(100.0) / 100), 1e-12);
  EXPECT_NEAR(w.hi, 1.0 / (3 * std::exp(1.0) * std::log(100.0) * 16), 1e-12);
  EXPECT_FALSE(BoundHeavytail(Query(100, 3, 1, 0.5)).valid);
}

TEST(BoundBerryEsseenTest, Example) {
  EXPECT_NEAR(BerryEsseenThreshold(100, 3), 0.3034854, 1e-6);
  const BoundValue b = BoundBerryEsseen(Query(100, 3, 1, 0.5));
  EXPECT_NEAR(b.value, 8e-4, 1e-15);
  EXPECT_TRUE(b.valid);
  EXPECT_FALSE(BoundBerryEsseen(Query(100, 3, 1, 0.3)).valid);
  TailBoundQuery zero = Query(100, 3, 1, 0.5);
  zero.constant = 0.0;
  EXPECT_EQ(BoundBerryEsseen(zero).value, 0.0);
}

TEST(BoundHighdTest, Example) {
  const BoundValue b = BoundHighd(Query(256, 4, 4, 1.0));
  EXPECT_NEAR(b.value, 16.0 / std::pow(256.0, 3) + std::exp(-64.0), 1e-18);
  EXPECT_NEAR(b.value, 9.5367e-7, 1e-10);
  EXPECT_LT(BoundHighd(Query(256, 4, 4, 1e6)).value, 1e-15);
  EXPECT_NEAR(HighdThreshold(256, 4), std::sqrt(4 * std::log(256.0) / 256),
              1e-12);
}

TEST(BoundConsistencyTest, PolynomialTermsAgree) {
  for (std::size_t m : {16, 100, 1000}) {
    for (double k : {3.0, 4.0, 6.0}) {
      for (double t : {0.2, 0.5, 1.0, 3.0}) {
        const double poly = BoundHeavytail(Query(m, k, 1, t)).polynomial_term;
        EXPECT_DOUBLE_EQ(BoundBerryEsseen(Query(m, k, 1, t)).value, poly);
        EXPECT_DOUBLE_EQ(BoundHighd(Query(m, k, 1, t)).polynomial_term, poly);
      }
    }
  }
}

TEST(BoundConsistencyTest, Monotone) {
  for (double k : {3.0, 4.0}) {
    for (std::size_t d : {1, 4}) {
      for (std::size_t m : {16, 256}) {
        double prev_h = INFINITY, prev_b = INFINITY, prev_d = INFINITY;
        double prev_n = INFINITY;
        for (double t = 0.1; t < 5; t += 0.1) {
          const double h = BoundHeavytail(Query(m, k, d, t)).value;
          const double b = BoundBerryEsseen(Query(m, k, d, t)).value;
          const double hd = BoundHighd(Query(m, k, d, t)).value;
          const double n = BoundNormOneSample(d, k, t);
          EXPECT_LE(h, prev_h);
          EXPECT_LE(b, prev_b);
          EXPECT_LE(hd, prev_d);
          EXPECT_LE(n, prev_n);
          prev_h = h;
          prev_b = b;
          prev_d = hd;
          prev_n = n;
        }
      }
      for (double t : {1.0, 2.0}) {
        EXPECT_LE(BoundHeavytail(Query(256, k, d, t)).value,
                  BoundHeavytail(Query(16, k, d, t)).value);
        EXPECT_LE(BoundHighd(Query(256, k, d, t)).value,
                  BoundHighd(Query(16, k, d, t)).value);
      }
    }
  }
}

TEST(BoundNormOneSampleTest, Examples) {
  EXPECT_DOUBLE_EQ(BoundNormOneSample(1, 2, 2), 0.25);
  EXPECT_NEAR(BoundNormOneSample(9, 3, 10), 0.027, 1e-15);
  EXPECT_EQ(BoundNormOneSample(4, 4, 0.5), 1.0);
  EXPECT_EQ(BoundMarkov(3, 1), 1.0);
  EXPECT_DOUBLE_EQ(BoundMarkov(3, 2), 0.125);
  EXPECT_LT(BoundMarkov(3, 1e9), 1e-20);
}

TEST(McTailTest, SymmetryAndLimits) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.0}, 4.0);
  const auto pts =
      McTail(spec, 8, {0.0, 100.0}, 200000, Seed{1}, TailMode::kOneSided);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0].empirical, 0.5, 4 * pts[0].std_error);
  EXPECT_LE(pts[0].wilson_lo, pts[0].empirical);
  EXPECT_GE(pts[0].wilson_hi, pts[0].empirical);
  EXPECT_EQ(pts[1].empirical, 0.0);
  EXPECT_EQ(pts[1].std_error, 0.0);
  EXPECT_EQ(pts[1].trials, 200000u);
}

TEST(McTailTest, GaussianMatchesErfc) {
  const double sigma4 = std::pow(3.0, 0.25);
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.0}, 4.0);
  const double t = 1.6449 / sigma4;
  const auto pts = McTail(spec, 1, {t}, 400000, Seed{2}, TailMode::kOneSided);
  const double oracle = 0.5 * std::erfc(t * sigma4 / std::sqrt(2.0));
  EXPECT_NEAR(oracle, 0.05, 1e-4);
  EXPECT_NEAR(pts[0].empirical, oracle, 4 * pts[0].std_error);
}

TEST(McTailTest, Preconditions) {
  const SyntheticSpec spec2 = SyntheticSpec::ScaledGaussian({0.0, 0.0}, 4.0);
  EXPECT_THROW(McTail(spec2, 4, {0.1}, 1000, Seed{1}, TailMode::kNorm),
               ParameterError);
  EXPECT_THROW(McTail(spec2, 4, {0.1}, 100000, Seed{1}, TailMode::kOneSided),
               ParameterError);
}

TEST(McTailTest, Deterministic) {
  const SyntheticSpec spec = SyntheticSpec::ScaledGaussian({0.0, 0.0}, 4.0);
  const auto a = McTail(spec, 4, {0.3}, 100000, Seed{3}, TailMode::kNorm);
  const auto b = McTail(spec, 4, {0.3}, 100000, Seed{3}, TailMode::kNorm);
  EXPECT_EQ(a[0].hits, b[0].hits);
}

TEST(LinearGridTest, Endpoints) {
  const auto g = LinearGrid(1.0, 3.0, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.front(), 1.0);
  EXPECT_DOUBLE_EQ(g[2], 2.0);
  EXPECT_DOUBLE_EQ(g.back(), 3.0);
}

TEST(BucketDiagnosticTest, TinyValuesVacuous) {
  const BucketPartition p = BucketDiagnostic(std::vector<double>(64, 0.01), 1);
  EXPECT_EQ(p.s2, 0u);
  EXPECT_EQ(p.s1, 64u);
  EXPECT_FALSE(p.premise);
  EXPECT_TRUE(p.claim_holds);
}

TEST(BucketDiagnosticTest, Fuzz) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> m_dist(2, 256);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int premises = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = m_dist(gen);
    const double t = 1.0 - unit(gen);  // (0, 1]
    std::vector<double> values(m);
    const double tail = 0.5 + 3 * unit(gen);
    for (double& v : values) {
      v = std::pow(1.0 - unit(gen), -1.0 / tail) - 1.0;
    }
    const BucketPartition p = BucketDiagnostic(values, t);
    EXPECT_EQ(p.s1 + p.s2 + p.s3, static_cast<std::size_t>(m));
    EXPECT_TRUE(p.claim_holds) << "m=" << m << " t=" << t;
    if (p.premise) ++premises;
  }
  EXPECT_GT(premises, 0);
}

TEST(BucketDiagnosticTest, AdversarialInstanceStaysBelowPremise) {
  const std::size_t m = 4096;
  const double t = 1.0;
  const double r2 = m * t / (3 * std::log(static_cast<double>(m)));
  const double ln_m = std::log(static_cast<double>(m));
  const int levels =
      static_cast<int>(std::ceil(std::log2(m * t * t / (3 * ln_m))));
  std::vector<double> values;
  std::vector<std::size_t> expected(levels, 0);
  for (int l = 1; l <= levels; ++l) {
    const double lo = r2 / std::ldexp(1.0, l);
    if (lo < 1.0 / t) continue;
    const std::size_t count = (std::size_t{1} << (l - 1)) - 1;
    values.insert(values.end(), count, lo);
    expected[l - 1] = count;
  }
  values.resize(m, 0.0);
  const BucketPartition p = BucketDiagnostic(values, t);
  EXPECT_EQ(p.num_levels, static_cast<std::size_t>(levels));
  EXPECT_EQ(p.counts, expected);
  EXPECT_FALSE(p.has_heavy_level);
  EXPECT_LT(p.s2_sum, m * t / 3);
  EXPECT_FALSE(p.premise);
  EXPECT_TRUE(p.claim_holds);
}

TEST(ExactBinomialTest, Values) {
  EXPECT_EQ(ExactBinomial(4, 2), 6u);
  EXPECT_EQ(ExactBinomial(64, 32), 1832624140942590534ull);
  EXPECT_EQ(ExactBinomial(10, 0), 1u);
  EXPECT_LE(6.0, std::pow(4 * std::exp(1.0) / 2, 2));
  EXPECT_NEAR(std::pow(4 * std::exp(1.0) / 2, 2), 29.5562, 1e-4);
}

TEST(LemmaChecksTest, AllPass) {
  const LemmaReport r = LemmaChecks(Seed{11});
  EXPECT_FALSE(r.checks.empty());
  for (const LemmaCheck& c : r.checks) {
    EXPECT_TRUE(c.pass) << c.name << " " << c.detail << " " << c.observed
                        << " > " << c.limit;
  }
  EXPECT_TRUE(r.all_pass());
}

TEST(FrozenConstantTest, Table) {
  for (Family f : {Family::kScaledGaussian, Family::kPointMassMixture}) {
    for (const char* b : {"heavytail", "berry_esseen", "highd"}) {
      EXPECT_EQ(FrozenConstant(f, b), 1.0);
    }
  }
  EXPECT_THROW(FrozenConstant(Family::kScaledGaussian, "other"),
               ParameterError);
}

}  // namespace
}  // namespace dpmean
