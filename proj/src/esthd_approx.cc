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
#include <string>

#include "dpmean/clipping.h"
#include "dpmean/errors.h"
#include "dpmean/est1d.h"
#include "dpmean/mechanisms.h"
#include "dpmean/parallel.h"

namespace dpmean {

std::string CoarseModeName(CoarseMode mode) {
  switch (mode) {
    case CoarseMode::kBasic:
      return "basic";
    case CoarseMode::kAdvanced:
      return "advanced";
    case CoarseMode::kAuto:
      return "auto";
  }
  return "unknown";
}

CoarseMode ParseCoarseMode(const std::string& name) {
  if (name == "basic") return CoarseMode::kBasic;
  if (name == "advanced") return CoarseMode::kAdvanced;
  if (name == "auto") return CoarseMode::kAuto;
  throw ConfigError("unknown coarse mode '" + name + "'");
}

CoarseHdResult CoarseEstimateHd(const PersonDataset& data,
                                const PrivacyBudget& budget, double r,
                                double R, double k, CoarseMode mode,
                                Seed seed) {
  if (!(budget.delta > 0.0)) {
    throw ModeError("high-dimensional coarse estimation needs delta > 0");
  }
  const double d = static_cast<double>(data.d());
  const double m = static_cast<double>(data.m());
  const double r_min = std::pow(16.0, 1.0 / k) * std::sqrt(d / m);
  if (!(r > r_min)) {
    throw ParameterError("coarse estimation needs r > 16^(1/k) sqrt(d/m) = " +
                         std::to_string(r_min));
  }
  const double basic_eps = budget.epsilon / d;
  const double advanced_eps =
      budget.epsilon / std::sqrt(6.0 * d * std::log(2.0 / budget.delta));
  CoarseHdResult out;
  if (mode == CoarseMode::kAuto) {
    mode = (advanced_eps > basic_eps && advanced_eps <= 1.0)
               ? CoarseMode::kAdvanced
               : CoarseMode::kBasic;
  }
  if (mode == CoarseMode::kAdvanced && advanced_eps > 1.0) {
    throw ModeError("advanced composition needs per-coordinate epsilon <= 1");
  }
  out.mode_used = mode;
  if (mode == CoarseMode::kBasic) {
    out.coordinate_epsilon = basic_eps;
    out.coordinate_delta = budget.delta / d;
  } else {
    out.coordinate_epsilon = advanced_eps;
    out.coordinate_delta = budget.delta / (2.0 * d);
  }
  out.coordinate_r = r / std::sqrt(d);
  out.center.assign(data.d(), 0.0);
  const PrivacyBudget coordinate_budget{out.coordinate_epsilon,
                                        out.coordinate_delta};
  ParallelFor(data.d(), [&](std::size_t c) {
    out.center[c] =
        RangeEstimator(data.Coordinate(c), coordinate_budget, out.coordinate_r,
                       R, k, Derive(seed, {kCoordinateStream, c}))
            .mu_coarse;
  });
  return out;
}

Vector ClippedMean(const PersonDataset& data, const ClipBall& ball) {
  const std::size_t d = data.d();
  if (ball.center.size() != d) {
    throw ParameterError("clip ball center has wrong dimension");
  }
  Vector means = data.PersonMeans();
  Vector sum(d, 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    std::span<double> s(means.data() + i * d, d);
    ClipInPlace(s, ball);
    for (std::size_t c = 0; c < d; ++c) sum[c] += s[c];
  }
  for (double& v : sum) v /= static_cast<double>(data.n());
  return sum;
}

double ClipAndNoiseStddev(std::size_t n, std::size_t d, double rho,
                          const PrivacyBudget& budget,
                          bool tight_sensitivity) {
  if (!(budget.delta > 0.0)) throw ModeError("clip-and-noise needs delta > 0");
  if (std::isinf(budget.epsilon) || rho == 0.0) return 0.0;
  const double proxy =
      tight_sensitivity ? 2.0 * rho
                        : 2.0 * std::sqrt(static_cast<double>(d)) * rho;
  return proxy * std::sqrt(2.0 * std::log(4.0 / budget.delta)) /
         (static_cast<double>(n) * budget.epsilon);
}

Vector ClipAndNoise(const PersonDataset& data, const PrivacyBudget& budget,
                    const ClipBall& ball, Seed seed, bool tight_sensitivity) {
  const double sigma = ClipAndNoiseStddev(data.n(), data.d(), ball.radius,
                                          budget, tight_sensitivity);
  Vector out = ClippedMean(data, ball);
  if (sigma == 0.0) return out;
  Rng rng(seed, {kGaussianStream});
  for (double& v : out) v += sigma * rng.Normal();
  return out;
}

TwoRoundConfig TwoRoundConfig::Compute(double n, double m, double d,
                                       double epsilon, double delta, double k,
                                       double rho1_scale, double rho2_scale) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ModeError("two-round radii need delta in (0, 1)");
  }
  const double floor_term = std::sqrt(d / m);
  const double common = std::pow(n * epsilon, 1.0 / k) /
                        (std::pow(std::log(1.0 / delta), 1.0 / (2.0 * k)) *
                         std::pow(m, 1.0 - 1.0 / k));
  TwoRoundConfig cfg;
  cfg.rho1_base =
      std::max(floor_term, common * std::pow(d, 0.5 - 1.0 / (2.0 * k)));
  cfg.rho2_base = std::max(floor_term, common * std::pow(d, 0.5 - 1.0 / k));
  cfg.rho1 = rho1_scale * cfg.rho1_base;
  cfg.rho2 = rho2_scale * cfg.rho2_base;
  return cfg;
}

double SingleRoundRho(double n, double m, double d, double epsilon,
                      double delta, double k, double c0) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ModeError("single-round radius needs delta in (0, 1)");
  }
  const double sampling = std::sqrt(d * std::log(m) / m);
  const double privacy =
      std::pow(d, (k - 1.0) / (2.0 * k)) * std::pow(epsilon * n, 1.0 / k) /
      (std::pow(m, 1.0 - 1.0 / k) *
       std::pow(std::log(1.0 / delta), 1.0 / (2.0 * k)));
  return c0 * (sampling + privacy);
}

namespace {

void CheckApprox(const PrivacyBudget& budget, const HdOptions& options) {
  if (!(budget.delta > 0.0)) {
    throw ModeError("approximate-DP estimators need delta > 0");
  }
  if (!(options.rho1_scale >= options.rho2_scale)) {
    throw ParameterError("rho1_scale must be >= rho2_scale");
  }
}

void RecordCoarse(const CoarseHdResult& coarse, EstimateReport& report) {
  report.vectors["mu_coarse"] = coarse.center;
  report.scalars["coarse_coordinate_epsilon"] = coarse.coordinate_epsilon;
  report.scalars["coarse_coordinate_delta"] = coarse.coordinate_delta;
  report.notes.push_back("coarse composition: " +
                         CoarseModeName(coarse.mode_used));
}

}  // namespace

EstimateReport EstimateSingleRound(const PersonDataset& data,
                                   const PrivacyBudget& budget,
                                   const ProblemParams& params, Seed seed,
                                   const HdOptions& options) {
  CheckApprox(budget, options);
  const double n = static_cast<double>(data.n());
  const double m = static_cast<double>(data.m());
  const double d = static_cast<double>(data.d());
  const PrivacyBudget half{budget.epsilon / 2.0, budget.delta / 2.0};
  const double r = options.coarse_r_factor * std::sqrt(d / m);
  const CoarseHdResult coarse =
      CoarseEstimateHd(data, half, r, params.range_R, params.k,
                       options.coarse_mode, Derive(seed, {kCoarseStream}));
  const double rho_formula =
      std::isinf(half.epsilon)
          ? std::numeric_limits<double>::infinity()
          : SingleRoundRho(n, m, d, half.epsilon, half.delta, params.k,
                           options.single_round_c0);
  const double rho_floor = r + std::sqrt(d * std::log(m) / m);
  const double rho = std::max(rho_formula, rho_floor);

  EstimateReport report;
  report.estimator = "hd_single";
  report.estimate =
      ClipAndNoise(data, half, ClipBall{coarse.center, rho},
                   Derive(seed, {kFineStream}), options.tight_sensitivity);
  report.scalars["rho"] = rho;
  report.scalars["rho_formula"] = rho_formula;
  report.scalars["coarse_r"] = r;
  report.scalars["noise_stddev"] = ClipAndNoiseStddev(
      data.n(), data.d(), rho, half, options.tight_sensitivity);
  RecordCoarse(coarse, report);
  report.ledger.Add("coarse: coordinate-wise range estimator", half.epsilon,
                    half.delta);
  report.ledger.Add("fine: clip and noise", half.epsilon, half.delta);
  report.seed = seed.value;
  return report;
}

EstimateReport EstimateTwoRound(const PersonDataset& data,
                                const PrivacyBudget& budget,
                                const ProblemParams& params, Seed seed,
                                const HdOptions& options) {
  CheckApprox(budget, options);
  const std::size_t third = data.n() / 3;
  if (third == 0) throw InputError("two-round estimator needs n >= 3");
  const double m = static_cast<double>(data.m());
  const double d = static_cast<double>(data.d());
  const PersonDataset y = data.People(0, third);
  const PersonDataset z = data.People(third, 2 * third);
  const PersonDataset v = data.People(2 * third, 3 * third);

  const PrivacyBudget coarse_budget{budget.epsilon / 2.0, budget.delta / 2.0};
  const PrivacyBudget round_budget{budget.epsilon / 4.0, budget.delta / 4.0};
  const double r = options.coarse_r_factor * std::sqrt(d / m);
  const CoarseHdResult coarse =
      CoarseEstimateHd(y, coarse_budget, r, params.range_R, params.k,
                       options.coarse_mode, Derive(seed, {kCoarseStream}));
  const TwoRoundConfig cfg = TwoRoundConfig::Compute(
      static_cast<double>(third), m, d, budget.epsilon, budget.delta, params.k,
      options.rho1_scale, options.rho2_scale);
  const Vector u2 = ClipAndNoise(z, round_budget, ClipBall{coarse.center,
                                                           cfg.rho1},
                                 Derive(seed, {kRoundStream, 1}),
                                 options.tight_sensitivity);
  EstimateReport report;
  report.estimator = "hd_two_round";
  report.estimate = ClipAndNoise(v, round_budget, ClipBall{u2, cfg.rho2},
                                 Derive(seed, {kRoundStream, 2}),
                                 options.tight_sensitivity);
  report.scalars["rho1"] = cfg.rho1;
  report.scalars["rho2"] = cfg.rho2;
  report.scalars["rho1_base"] = cfg.rho1_base;
  report.scalars["rho2_base"] = cfg.rho2_base;
  report.scalars["coarse_r"] = r;
  report.scalars["people_per_round"] = static_cast<double>(third);
  report.scalars["dropped_people"] =
      static_cast<double>(data.n() - 3 * third);
  RecordCoarse(coarse, report);
  report.vectors["u1"] = coarse.center;
  report.vectors["u2"] = u2;
  report.ledger.Add("coarse: coordinate-wise range estimator",
                    coarse_budget.epsilon, coarse_budget.delta);
  report.ledger.Add("round 1: clip and noise", round_budget.epsilon,
                    round_budget.delta);
  report.ledger.Add("round 2: clip and noise", round_budget.epsilon,
                    round_budget.delta);
  report.seed = seed.value;
  return report;
}

}  // namespace dpmean
