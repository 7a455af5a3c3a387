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
#include <string>

#include "dpmean/errors.h"
#include "dpmean/mechanisms.h"

namespace dpmean {

CoarseResult RangeEstimator(const PersonDataset& data,
                            const PrivacyBudget& budget, double r, double R,
                            double k, Seed seed) {
  if (data.d() != 1) throw InputError("range estimator needs d = 1 data");
  const double sqrt_m = std::sqrt(static_cast<double>(data.m()));
  const double r_min = std::pow(16.0, 1.0 / k) / sqrt_m;
  if (!(r > r_min && r < R)) {
    throw ParameterError("range estimator needs 16^(1/k)/sqrt(m) = " +
                         std::to_string(r_min) + " < r < R, got r = " +
                         std::to_string(r) + ", R = " + std::to_string(R));
  }
  if (sqrt_m * r < 2.0) {
    throw ParameterError("range estimator needs sqrt(m) * r >= 2");
  }
  const Vector averages = data.PersonMeans();
  const HistogramSpec spec = HistogramSpec::Make(r, R);
  const NoisyHistogram hist = PrivateHistogram(averages, spec, budget, seed);

  std::size_t best = spec.num_buckets;
  for (std::size_t b = 0; b < spec.num_buckets; ++b) {
    if (!hist.released[b]) continue;
    if (best == spec.num_buckets || hist.counts[b] > hist.counts[best]) {
      best = b;
    }
  }
  if (best == spec.num_buckets) {
    throw EstimationFailed(
        "range estimator: every histogram bucket was suppressed");
  }
  CoarseResult out;
  out.bucket_left = spec.left(best);
  out.bucket_right = spec.right(best);
  out.mu_coarse = spec.midpoint(best);
  out.accuracy_claim = 2.0 * r;
  out.dropped = hist.dropped;
  return out;
}

double TruncatedMean1d(const PersonDataset& data, double center, double rho) {
  const Vector averages = data.PersonMeans();
  double sum = 0.0;
  for (double s : averages) sum += std::clamp(s, center - rho, center + rho);
  return sum / static_cast<double>(data.n());
}

EstimateReport FineEstimate1d(const PersonDataset& data,
                              const PrivacyBudget& budget,
                              const CoarseResult& coarse,
                              const FineConfig& cfg, Seed seed) {
  if (data.d() != 1) throw InputError("fine estimate needs d = 1 data");
  if (!budget.pure()) {
    throw ModeError("the univariate fine step uses Laplace noise (delta = 0)");
  }
  if (!(cfg.rho > cfg.u_err)) {
    throw ParameterError("fine estimate needs rho > u_err");
  }
  const double n = static_cast<double>(data.n());
  const double truncated = TruncatedMean1d(data, coarse.mu_coarse, cfg.rho);
  const double scale = std::isinf(budget.epsilon)
                           ? 0.0
                           : 2.0 * cfg.rho / (n * budget.epsilon);
  const double noise = scale > 0.0 ? LaplaceNoise(scale, seed) : 0.0;

  EstimateReport report;
  report.estimator = "fine_1d";
  report.estimate = {truncated + noise};
  report.scalars["rho"] = cfg.rho;
  report.scalars["u_err"] = cfg.u_err;
  report.scalars["laplace_scale"] = scale;
  report.vectors["mu_coarse"] = {coarse.mu_coarse};
  report.ledger.Add("fine: truncated mean + Laplace", budget.epsilon, 0.0);
  report.seed = seed.value;
  return report;
}

double ChooseRho1d(double n, double m, double epsilon, double beta, double k,
                   double constant_c) {
  if (!(n > 0 && m > 0 && epsilon > 0 && beta > 0 && beta < 1 && k > 0)) {
    throw ParameterError("choose_rho_1d needs positive arguments, beta < 1");
  }
  const double sampling = std::sqrt((k - 1.0) * std::log(m) / m);
  const double privacy = std::pow(n * epsilon / std::log(1.0 / beta), 1.0 / k) /
                         std::pow(m, 1.0 - 1.0 / k);
  return constant_c * (sampling + privacy);
}

EstimateReport EstimateMean1d(const PersonDataset& data,
                              const PrivacyBudget& budget,
                              const ProblemParams& params, Seed seed,
                              const Est1dOptions& options) {
  if (data.d() != 1) throw InputError("estimate_mean_1d needs d = 1 data");
  if (!(options.coarse_share > 0.0 && options.coarse_share < 1.0)) {
    throw ParameterError("coarse share must be in (0, 1)");
  }
  const double m = static_cast<double>(data.m());
  const double n = static_cast<double>(data.n());
  const double k = params.k;
  const double r = std::max(std::pow(16.0, 1.0 / k), 16.0) / std::sqrt(m);

  const PrivacyBudget coarse_budget{budget.epsilon * options.coarse_share,
                                    budget.delta};
  const PrivacyBudget fine_budget{budget.epsilon * (1.0 - options.coarse_share),
                                  0.0};
  const CoarseResult coarse = RangeEstimator(data, coarse_budget, r,
                                             params.range_R, k,
                                             Derive(seed, {kCoarseStream}));

  const double u_err = 2.0 * r;
  const double rho_formula =
      std::isinf(fine_budget.epsilon)
          ? std::numeric_limits<double>::infinity()
          : ChooseRho1d(n, m, fine_budget.epsilon, params.beta, k,
                        options.rho_constant);
  const double rho_floor = u_err + std::sqrt((k - 1.0) * std::log(m) / m);
  const FineConfig cfg{std::max(rho_formula, rho_floor), u_err};
  EstimateReport report = FineEstimate1d(data, fine_budget, coarse, cfg,
                                         Derive(seed, {kFineStream}));

  report.estimator = "est1d";
  report.scalars["r"] = r;
  report.scalars["rho_formula"] = rho_formula;
  report.scalars["rho_constant"] = options.rho_constant;
  report.scalars["coarse_dropped"] = static_cast<double>(coarse.dropped);
  report.ledger.entries.insert(
      report.ledger.entries.begin(),
      LedgerEntry{"coarse: range estimator histogram", coarse_budget.epsilon,
                  coarse_budget.delta, 0});
  report.seed = seed.value;
  return report;
}

}  // namespace dpmean
