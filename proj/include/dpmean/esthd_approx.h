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

#ifndef DPMEAN_ESTHD_APPROX_H_
#define DPMEAN_ESTHD_APPROX_H_

#include <string>

#include "dpmean/core.h"
#include "dpmean/random.h"
#include "dpmean/report.h"

namespace dpmean {

enum class CoarseMode { kBasic, kAdvanced, kAuto };

std::string CoarseModeName(CoarseMode mode);
CoarseMode ParseCoarseMode(const std::string& name);

struct CoarseHdResult {
  Vector center;
  CoarseMode mode_used = CoarseMode::kBasic;
  double coordinate_epsilon = 0.0;
  double coordinate_delta = 0.0;
  double coordinate_r = 0.0;
};

// Runs RangeEstimator on every coordinate with r' = r / sqrt(d).
//   basic:    eps/d, delta/d per coordinate.
//   advanced: eps0 = eps / sqrt(6 d ln(2/delta)) and delta/(2d) per
//             coordinate, composed with slack delta/2, so the total is
//             exactly (eps, delta).
//   auto:     whichever gives the larger per-coordinate epsilon.
// Requires delta > 0 and r > 16^(1/k) sqrt(d/m).
CoarseHdResult CoarseEstimateHd(const PersonDataset& data,
                                const PrivacyBudget& budget, double r,
                                double R, double k, CoarseMode mode,
                                Seed seed);

// Average of per-person averages after clipping each to the ball.
Vector ClippedMean(const PersonDataset& data, const ClipBall& ball);

// Per-coordinate noise stddev of ClipAndNoise:
// 2 sqrt(d) rho sqrt(2 ln(4/delta)) / (n eps), or 2 rho ... when tight.
double ClipAndNoiseStddev(std::size_t n, std::size_t d, double rho,
                          const PrivacyBudget& budget, bool tight_sensitivity);

Vector ClipAndNoise(const PersonDataset& data, const PrivacyBudget& budget,
                    const ClipBall& ball, Seed seed,
                    bool tight_sensitivity = false);

// Radii of the two fine rounds, before and after the scale constants.
struct TwoRoundConfig {
  double rho1_base = 0.0;
  double rho2_base = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;

  // n is the size of one third of the people.
  static TwoRoundConfig Compute(double n, double m, double d, double epsilon,
                                double delta, double k, double rho1_scale,
                                double rho2_scale);
};

// c0 (sqrt(d ln m / m)
//     + d^((k-1)/(2k)) eps^(1/k) n^(1/k) / (m^(1-1/k) (ln 1/delta)^(1/(2k))))
double SingleRoundRho(double n, double m, double d, double epsilon,
                      double delta, double k, double c0);

struct HdOptions {
  CoarseMode coarse_mode = CoarseMode::kAuto;
  bool tight_sensitivity = false;
  // Coarse accuracy target is coarse_r_factor * sqrt(d/m).
  double coarse_r_factor = 16.0;
  double single_round_c0 = 4.0;
  double rho1_scale = 16.0;
  double rho2_scale = 4.0;
};

// Coarse estimate on (eps/2, delta/2), then one ClipAndNoise on
// (eps/2, delta/2) with rho = max(SingleRoundRho, r + sqrt(d ln m / m)).
EstimateReport EstimateSingleRound(const PersonDataset& data,
                                   const PrivacyBudget& budget,
                                   const ProblemParams& params, Seed seed,
                                   const HdOptions& options = {});

// People split into thirds Y, Z, V (remainder dropped):
// u1 = coarse(Y; eps/2, delta/2), u2 = ClipAndNoise(Z; eps/4, delta/4, rho1,
// u1), estimate = ClipAndNoise(V; eps/4, delta/4, rho2, u2).
EstimateReport EstimateTwoRound(const PersonDataset& data,
                                const PrivacyBudget& budget,
                                const ProblemParams& params, Seed seed,
                                const HdOptions& options = {});

}  // namespace dpmean

#endif  // DPMEAN_ESTHD_APPROX_H_
