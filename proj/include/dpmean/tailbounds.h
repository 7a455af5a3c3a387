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

#ifndef DPMEAN_TAILBOUNDS_H_
#define DPMEAN_TAILBOUNDS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "dpmean/random.h"
#include "dpmean/synthetic.h"

namespace dpmean {

struct TailBoundQuery {
  std::size_t m = 1;
  double k = 4.0;
  std::size_t d = 1;
  double t = 1.0;
  double constant = 1.0;
};

struct BoundValue {
  double value = 0.0;
  double polynomial_term = 0.0;
  double exponential_term = 0.0;
  // "polynomial" or "exponential", whichever is larger.
  std::string dominant;
  // False when t lies outside the domain where the bound is proved. The
  // value is still evaluated.
  bool valid = true;
};

// Window (sqrt(ln m / m), (1 / (3 e ln m 4^(k-1)))^(1/(k-2))) used for the
// validity flag of BoundHeavytail. The window is empty for most m.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
};
Window HeavytailWindow(std::size_t m, double k);

// C (1/(m^(k-1) t^k) + exp(-m t^2 / 12)); requires k >= 3.
BoundValue BoundHeavytail(const TailBoundQuery& q);

// sqrt((k-1) ln m / m).
double BerryEsseenThreshold(std::size_t m, double k);

// C m^(-k+1) t^(-k); valid for t >= BerryEsseenThreshold.
BoundValue BoundBerryEsseen(const TailBoundQuery& q);

// sqrt(d ln m / m).
double HighdThreshold(std::size_t m, std::size_t d);

// C (d^(k/2) / (m^(k-1) t^k) + exp(-m t^2 / d)); valid for
// t >= HighdThreshold.
BoundValue BoundHighd(const TailBoundQuery& q);

// min(1, d^(k/2) t^(-k)).
double BoundNormOneSample(std::size_t d, double k, double t);

// min(1, t^(-k)).
double BoundMarkov(double k, double t);

enum class TailMode {
  // P[(1/m) sum X_i - mu >= t], d = 1.
  kOneSided,
  // P[||(1/m) sum X_i - mu||_2 >= t].
  kNorm,
};

struct TailPoint {
  double t = 0.0;
  std::size_t hits = 0;
  std::size_t trials = 0;
  double empirical = 0.0;
  // Wald standard error sqrt(p (1 - p) / N); 0 when p = 0.
  double std_error = 0.0;
  // 95% Wilson score interval.
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

// Monte Carlo tail probabilities of the m-sample average; one set of draws
// is shared by every t. Requires trials >= 10^5.
std::vector<TailPoint> McTail(const SyntheticSpec& spec, std::size_t m,
                              const std::vector<double>& t_grid,
                              std::size_t trials, Seed seed, TailMode mode);

// `count` points evenly spaced on [lo, hi].
std::vector<double> LinearGrid(double lo, double hi, std::size_t count);

struct BucketPartition {
  double r1 = 0.0;  // 1/t
  double r2 = 0.0;  // m t / (3 ln m)
  std::size_t num_levels = 0;
  // counts[l - 1] = |B_l| restricted to S2, l = 1..num_levels.
  std::vector<std::size_t> counts;
  std::size_t s1 = 0;
  std::size_t s2 = 0;
  std::size_t s3 = 0;
  double s2_sum = 0.0;
  // s2_sum >= m t / 3.
  bool premise = false;
  // Some level has |B_l| >= 2^(l-1).
  bool has_heavy_level = false;
  // premise implies has_heavy_level.
  bool claim_holds = true;
};

// Splits values into S1 (< 1/t), S2 ([1/t, r2)), S3 (>= r2) and S2 further
// into levels B_l = [r2 / 2^l, r2 / 2^(l-1)), l = 1..ceil(log2(m t^2 /
// (3 ln m))). Requires t > 0 and at least two values.
BucketPartition BucketDiagnostic(const std::vector<double>& values, double t);

struct LemmaCheck {
  std::string name;
  std::string detail;
  double observed = 0.0;
  double limit = 0.0;
  bool pass = true;
};

struct LemmaReport {
  std::vector<LemmaCheck> checks;
  bool all_pass() const;
};

// Binomial bound, truncated variance, Bernstein, Laplace tail, histogram
// l-infinity error, exponential-mechanism utility.
LemmaReport LemmaChecks(Seed seed);

// Exact C(m, j) for m <= 64.
unsigned long long ExactBinomial(unsigned m, unsigned j);

// Frozen calibration constants for the tail-bound domination tests. Keys:
// family name and one of "heavytail", "berry_esseen", "highd".
double FrozenConstant(Family family, const std::string& bound_name);

// Candidate constants searched when calibrating.
inline constexpr double kCalibrationCandidates[] = {1, 2, 4, 8, 16};

}  // namespace dpmean

#endif  // DPMEAN_TAILBOUNDS_H_
