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

#ifndef DPMEAN_ESTHD_PURE_H_
#define DPMEAN_ESTHD_PURE_H_

#include <cstddef>
#include <vector>

#include "dpmean/core.h"
#include "dpmean/random.h"
#include "dpmean/report.h"

namespace dpmean {

struct PureOptions {
  // c_rho in rho = c_rho (sqrt((k-1) ln m / m) + 1 / (m alpha^(1/(k-1)))).
  double rho_constant = 8.0;
  // The global cover uses ceil(cover_refinement * sqrt(d)) steps per
  // coordinate on [-alpha, alpha]; 1 gives the coarsest grid with step
  // 2 alpha / sqrt(d).
  double cover_refinement = 9.0;
};

double PureRho(double m, double k, double alpha, double rho_constant);

// ceil(10 ln(1/beta)).
std::size_t NumSubsamples(double beta);

struct MoMConfig {
  std::size_t num_subsamples = 0;
  std::size_t subsample_size = 0;
  std::size_t dropped = 0;
  double rho = 0.0;
};

struct Comparison {
  bool p_wins = true;
  // Fewest whole-batch replacements that flip the outcome, where one
  // replaced batch moves its subsample mean by at most 2 rho / subsample_size.
  double margin_batches = 0.0;
  double median = 0.0;
  double threshold = 0.0;
};

struct ScoreRecord {
  Vector candidate;
  double score = 0.0;
  double cap = 0.0;
};

// Truncated median-of-means comparisons for one dataset. Per-person
// averages and subsample sums are computed once; each comparison then costs
// O(num_subsamples * d) plus the persons whose average lies farther than rho
// from p (the only ones the truncation can move).
class PairwiseTester {
 public:
  PairwiseTester(const PersonDataset& data, double k, double alpha,
                 double beta,
                 const PureOptions& options = {});

  const MoMConfig& config() const { return config_; }
  std::size_t dim() const { return d_; }
  double alpha() const { return alpha_; }
  // Score cap n * alpha over the people actually used.
  double cap() const;

  // Persons farther than rho from p, grouped by subsample.
  std::vector<std::vector<std::size_t>> Outliers(
      std::span<const double> p) const;

  Comparison Compare(std::span<const double> p, std::span<const double> q,
                     const std::vector<std::vector<std::size_t>>& outliers)
      const;
  Comparison Compare(std::span<const double> p,
                     std::span<const double> q) const;

  // min over q in the local cover of p of the margin while p wins, 0 as soon
  // as some q beats p, capped at n * alpha.
  ScoreRecord Score(std::span<const double> p) const;

 private:
  std::size_t d_;
  double alpha_;
  MoMConfig config_;
  Vector means_;  // people x d, dropped people removed
  Vector sums_;   // num_subsamples x d
};

Comparison BinMeanComp(const PersonDataset& data, std::span<const double> p,
                       std::span<const double> q, double k, double alpha,
                       double beta,
                       const PureOptions& options = {});

ScoreRecord ScoreCandidate(const PersonDataset& data,
                           std::span<const double> p, double k,
                           double alpha, double beta, const PureOptions& options = {});

// Grid p +- 2 alpha with ceil(16 sqrt(d)) steps per coordinate (step at most
// alpha / (4 sqrt(d))), minus the closed l2 ball of radius alpha around p.
std::vector<Vector> LocalCover(std::span<const double> p, double alpha);

// Product grid on [-alpha, alpha]^d.
std::vector<Vector> GlobalCover(std::size_t d, double alpha,
                                double refinement);

// Selection margin for minimum count: the number of subsample means that
// must cross `threshold` and the cheapest way to do it. Exposed for tests.
double FlipCost(std::span<const double> subsample_means, double threshold,
                double step, bool p_wins);

struct FineResult {
  Vector estimate;
  std::size_t winner = 0;
  std::vector<Vector> cover;
  std::vector<double> scores;
  MoMConfig mom;
  double inner_alpha = 0.0;
  double inner_beta = 0.0;
};

// Scores every point of the global cover with TestCan at 8 alpha / 9 and
// failure beta / (2 |cover|), then samples one with the exponential
// mechanism (sensitivity 1). Requires d <= 4.
FineResult FineEstPure(const PersonDataset& data, double k, double alpha,
                       double beta, double epsilon, Seed seed,
                       const PureOptions& options = {});

// First half of the people: coordinate-wise univariate estimates with
// eps/d and beta/(2d). Second half: recentered, FineEstPure with beta/2 and
// eps, shifted back. The halves hold disjoint people (parallel composition).
EstimateReport EstimatePureFull(const PersonDataset& data,
                                const ProblemParams& params, double epsilon,
                                Seed seed, const PureOptions& options = {});

}  // namespace dpmean

#endif  // DPMEAN_ESTHD_PURE_H_
