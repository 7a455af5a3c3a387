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

#ifndef DPMEAN_EST1D_H_
#define DPMEAN_EST1D_H_

#include <cstddef>

#include "dpmean/core.h"
#include "dpmean/random.h"
#include "dpmean/report.h"

namespace dpmean {

struct CoarseResult {
  double mu_coarse = 0.0;
  double bucket_left = 0.0;
  double bucket_right = 0.0;
  // 2r: the accuracy the coarse step targets.
  double accuracy_claim = 0.0;
  // Per-person averages that fell outside the histogram grid.
  std::size_t dropped = 0;
};

// Private histogram over per-person averages with buckets of width r on
// [-R-2r, R+2r); returns the midpoint of the bucket with the largest noisy
// count (ties: smallest left endpoint). delta = 0 uses the Laplace histogram,
// delta > 0 the stability histogram. Requires d = 1,
// 16^(1/k)/sqrt(m) < r < R and sqrt(m) r >= 2.
CoarseResult RangeEstimator(const PersonDataset& data,
                            const PrivacyBudget& budget, double r, double R,
                            double k, Seed seed);

struct FineConfig {
  double rho = 1.0;
  // Coarse accuracy assumed when the bias bound is applied.
  double u_err = 0.0;
};

// Per-person averages truncated to mu_coarse +- rho, averaged, plus
// Laplace(2 rho / (n epsilon)). Budget must be pure.
EstimateReport FineEstimate1d(const PersonDataset& data,
                              const PrivacyBudget& budget,
                              const CoarseResult& coarse,
                              const FineConfig& cfg, Seed seed);

// Pre-noise statistic of FineEstimate1d.
double TruncatedMean1d(const PersonDataset& data, double center, double rho);

// constant_c * (sqrt((k-1) ln m / m) + (n eps / ln(1/beta))^(1/k) / m^(1-1/k))
double ChooseRho1d(double n, double m, double epsilon, double beta, double k,
                   double constant_c);

struct Est1dOptions {
  double rho_constant = 4.0;
  // Fraction of epsilon spent on the coarse step.
  double coarse_share = 0.5;
};

// Coarse step with r = max(16^(1/k), 16)/sqrt(m) on the coarse share of the
// budget (all of delta), then FineEstimate1d on the rest with
// u_err = 2r and rho = max(ChooseRho1d, u_err + sqrt((k-1) ln m / m)).
EstimateReport EstimateMean1d(const PersonDataset& data,
                              const PrivacyBudget& budget,
                              const ProblemParams& params, Seed seed,
                              const Est1dOptions& options = {});

}  // namespace dpmean

#endif  // DPMEAN_EST1D_H_
