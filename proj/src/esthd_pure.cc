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

#include "dpmean/esthd_pure.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpmean/errors.h"
#include "dpmean/est1d.h"
#include "dpmean/mechanisms.h"
#include "dpmean/parallel.h"

namespace dpmean {
namespace {

constexpr std::size_t kMaxPureDim = 4;

// All points center + offsets[i_1] e_1 + ... + offsets[i_d] e_d.
std::vector<Vector> ProductGrid(std::span<const double> center,
                                const Vector& offsets) {
  const std::size_t d = center.size();
  const std::size_t per = offsets.size();
  std::size_t total = 1;
  for (std::size_t c = 0; c < d; ++c) total *= per;
  std::vector<Vector> points;
  points.reserve(total);
  std::vector<std::size_t> digit(d, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vector x(d);
    for (std::size_t c = 0; c < d; ++c) x[c] = center[c] + offsets[digit[c]];
    points.push_back(std::move(x));
    for (std::size_t c = 0; c < d; ++c) {
      if (++digit[c] < per) break;
      digit[c] = 0;
    }
  }
  return points;
}

Vector EvenOffsets(double half_width, std::size_t steps) {
  Vector offsets(steps + 1);
  for (std::size_t s = 0; s <= steps; ++s) {
    offsets[s] = -half_width + 2.0 * half_width * static_cast<double>(s) /
                                   static_cast<double>(steps);
  }
  return offsets;
}

}  // namespace

double PureRho(double m, double k, double alpha, double rho_constant) {
  return rho_constant * (std::sqrt((k - 1.0) * std::log(m) / m) +
                         1.0 / (m * std::pow(alpha, 1.0 / (k - 1.0))));
}

std::size_t NumSubsamples(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ParameterError("beta must be in (0, 1)");
  }
  return static_cast<std::size_t>(std::ceil(10.0 * std::log(1.0 / beta)));
}

double FlipCost(std::span<const double> subsample_means, double threshold,
                double step, bool p_wins) {
  const std::size_t k = subsample_means.size();
  std::vector<double> costs;
  std::size_t already = 0;
  std::size_t need;
  if (p_wins) {
    // p loses once floor(k/2) + 1 means exceed the threshold.
    need = k / 2 + 1;
    for (double mean : subsample_means) {
      if (mean > threshold) {
        ++already;
      } else {
        costs.push_back(std::floor((threshold - mean) / step) + 1.0);
      }
    }
  } else {
    // p wins once ceil(k/2) means are at or below the threshold.
    need = (k + 1) / 2;
    for (double mean : subsample_means) {
      if (mean <= threshold) {
        ++already;
      } else {
        costs.push_back(std::ceil((mean - threshold) / step));
      }
    }
  }
  if (already >= need) return 0.0;
  const std::size_t take = need - already;
  std::nth_element(costs.begin(), costs.begin() + (take - 1), costs.end());
  double total = 0.0;
  for (std::size_t i = 0; i < take; ++i) total += costs[i];
  return total;
}

PairwiseTester::PairwiseTester(const PersonDataset& data, double k,
                               double alpha, double beta,
                               const PureOptions& options)
    : d_(data.d()), alpha_(alpha) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be > 0");
  config_.num_subsamples = NumSubsamples(beta);
  if (data.n() < config_.num_subsamples) {
    throw ConfigError("median of means needs n >= " +
                      std::to_string(config_.num_subsamples) + " people, got " +
                      std::to_string(data.n()));
  }
  config_.subsample_size = data.n() / config_.num_subsamples;
  config_.dropped = data.n() % config_.num_subsamples;
  config_.rho = PureRho(static_cast<double>(data.m()), k, alpha,
                        options.rho_constant);
  const std::size_t used = config_.num_subsamples * config_.subsample_size;
  means_ = data.PersonMeans();
  means_.resize(used * d_);
  sums_.assign(config_.num_subsamples * d_, 0.0);
  for (std::size_t i = 0; i < used; ++i) {
    const std::size_t j = i / config_.subsample_size;
    for (std::size_t c = 0; c < d_; ++c) {
      sums_[j * d_ + c] += means_[i * d_ + c];
    }
  }
}

double PairwiseTester::cap() const {
  return static_cast<double>(config_.num_subsamples * config_.subsample_size) *
         alpha_;
}

std::vector<std::vector<std::size_t>> PairwiseTester::Outliers(
    std::span<const double> p) const {
  std::vector<std::vector<std::size_t>> out(config_.num_subsamples);
  const std::size_t used = config_.num_subsamples * config_.subsample_size;
  for (std::size_t i = 0; i < used; ++i) {
    std::span<const double> s(means_.data() + i * d_, d_);
    if (Distance2(s, p) > config_.rho) {
      out[i / config_.subsample_size].push_back(i);
    }
  }
  return out;
}

Comparison PairwiseTester::Compare(
    std::span<const double> p, std::span<const double> q,
    const std::vector<std::vector<std::size_t>>& outliers) const {
  Vector u(d_);
  for (std::size_t c = 0; c < d_; ++c) u[c] = q[c] - p[c];
  const double gap = Norm2(u);
  if (!(gap > 0.0)) throw ParameterError("comparison needs p != q");
  for (double& x : u) x /= gap;
  const double p0 = Dot(u, p);
  const double q0 = Dot(u, q);
  const double lo = p0 - config_.rho;
  const double hi = p0 + config_.rho;
  const double s = static_cast<double>(config_.subsample_size);

  Vector sub_means(config_.num_subsamples);
  for (std::size_t j = 0; j < config_.num_subsamples; ++j) {
    double total = Dot(u, std::span<const double>(sums_.data() + j * d_, d_));
    for (std::size_t i : outliers[j]) {
      const double proj =
          Dot(u, std::span<const double>(means_.data() + i * d_, d_));
      total += std::clamp(proj, lo, hi) - proj;
    }
    sub_means[j] = total / s;
  }
  Comparison out;
  out.threshold = 0.5 * (p0 + q0);
  // Lower median: the ceil(k/2)-th smallest.
  Vector sorted = sub_means;
  const std::size_t mid = (sorted.size() + 1) / 2 - 1;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  out.median = sorted[mid];
  out.p_wins = out.median <= out.threshold;
  out.margin_batches = FlipCost(sub_means, out.threshold,
                                2.0 * config_.rho / s, out.p_wins);
  return out;
}

Comparison PairwiseTester::Compare(std::span<const double> p,
                                   std::span<const double> q) const {
  return Compare(p, q, Outliers(p));
}

ScoreRecord PairwiseTester::Score(std::span<const double> p) const {
  ScoreRecord record;
  record.candidate.assign(p.begin(), p.end());
  record.cap = cap();
  record.score = record.cap;
  const auto outliers = Outliers(p);
  for (const Vector& q : LocalCover(p, alpha_)) {
    const Comparison cmp = Compare(p, q, outliers);
    if (!cmp.p_wins) {
      record.score = 0.0;
      break;
    }
    record.score = std::min(record.score, cmp.margin_batches);
  }
  return record;
}

Comparison BinMeanComp(const PersonDataset& data, std::span<const double> p,
                       std::span<const double> q, double k, double alpha,
                       double beta,
                       const PureOptions& options) {
  if (p.size() != data.d() || q.size() != data.d()) {
    throw ParameterError("comparison points have wrong dimension");
  }
  return PairwiseTester(data, k, alpha, beta, options).Compare(p, q);
}

ScoreRecord ScoreCandidate(const PersonDataset& data,
                           std::span<const double> p, double k,
                           double alpha, double beta, const PureOptions& options) {
  if (p.size() != data.d()) {
    throw ParameterError("candidate has wrong dimension");
  }
  return PairwiseTester(data, k, alpha, beta, options).Score(p);
}

std::vector<Vector> LocalCover(std::span<const double> p, double alpha) {
  const std::size_t d = p.size();
  const auto steps = static_cast<std::size_t>(
      std::ceil(16.0 * std::sqrt(static_cast<double>(d))));
  const std::vector<Vector> grid = ProductGrid(p, EvenOffsets(2.0 * alpha,
                                                              steps));
  std::vector<Vector> cover;
  cover.reserve(grid.size());
  for (const Vector& x : grid) {
    // Small slack so grid points that sit on the sphere up to rounding are
    // removed as the closed ball intends.
    if (Distance2(x, p) > alpha * (1.0 + 1e-12)) cover.push_back(x);
  }
  if (cover.empty()) throw RuntimeFailure("local cover is empty");
  return cover;
}

std::vector<Vector> GlobalCover(std::size_t d, double alpha,
                                double refinement) {
  if (!(refinement >= 1.0)) {
    throw ParameterError("cover refinement must be >= 1");
  }
  const auto steps = static_cast<std::size_t>(
      std::ceil(refinement * std::sqrt(static_cast<double>(d)) - 1e-9));
  const Vector origin(d, 0.0);
  return ProductGrid(origin, EvenOffsets(alpha, std::max<std::size_t>(1, steps)));
}

FineResult FineEstPure(const PersonDataset& data, double k, double alpha,
                       double beta, double epsilon, Seed seed, const PureOptions& options) {
  if (data.d() > kMaxPureDim) {
    throw ScaleError(
        "pure-DP fine estimation enumerates (O(sqrt d))^d cover points per "
        "candidate; d = " +
        std::to_string(data.d()) + " exceeds the supported maximum of 4");
  }
  if (!(alpha > 0.0)) throw ParameterError("alpha must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must be in (0,1)");
  FineResult result;
  result.cover = GlobalCover(data.d(), alpha, options.cover_refinement);
  result.inner_alpha = 8.0 * alpha / 9.0;
  result.inner_beta = beta / (2.0 * static_cast<double>(result.cover.size()));
  const PairwiseTester tester(data, k, result.inner_alpha, result.inner_beta,
                              options);
  result.mom = tester.config();
  result.scores.assign(result.cover.size(), 0.0);
  ParallelFor(result.cover.size(), [&](std::size_t i) {
    result.scores[i] = tester.Score(result.cover[i]).score;
  });
  result.winner = ExponentialMechanism(result.scores, 1.0, epsilon, seed);
  result.estimate = result.cover[result.winner];
  return result;
}

EstimateReport EstimatePureFull(const PersonDataset& data,
                                const ProblemParams& params, double epsilon,
                                Seed seed, const PureOptions& options) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  const std::size_t half = data.n() / 2;
  if (half == 0) throw InputError("pure-DP estimator needs n >= 2");
  const std::size_t d = data.d();
  if (d > kMaxPureDim) {
    throw ScaleError("pure-DP estimator supports d <= 4");
  }
  const PersonDataset first = data.People(0, half);
  const PersonDataset second = data.People(half, 2 * half);

  const double dd = static_cast<double>(d);
  const PrivacyBudget coordinate_budget{epsilon / dd, 0.0};
  ProblemParams coordinate_params = params;
  coordinate_params.beta = params.beta / (2.0 * dd);
  Vector mu_coarse(d);
  ParallelFor(d, [&](std::size_t c) {
    mu_coarse[c] = EstimateMean1d(first.Coordinate(c), coordinate_budget,
                                  coordinate_params,
                                  Derive(seed, {kCoordinateStream, c}))
                       .estimate[0];
  });

  const FineResult fine =
      FineEstPure(second.Shifted(mu_coarse), params.k, params.alpha, params.beta / 2.0,
                  epsilon, Derive(seed, {kFineStream}), options);
  EstimateReport report;
  report.estimator = "pure_dp";
  report.estimate = fine.estimate;
  for (std::size_t c = 0; c < d; ++c) report.estimate[c] += mu_coarse[c];
  report.vectors["mu_coarse"] = mu_coarse;
  report.vectors["fine_offset"] = fine.estimate;
  report.scalars["rho"] = fine.mom.rho;
  report.scalars["num_subsamples"] = static_cast<double>(fine.mom.num_subsamples);
  report.scalars["subsample_size"] = static_cast<double>(fine.mom.subsample_size);
  report.scalars["dropped_people"] = static_cast<double>(
      fine.mom.dropped + (data.n() - 2 * half));
  report.scalars["cover_size"] = static_cast<double>(fine.cover.size());
  report.scalars["winner_score"] = fine.scores[fine.winner];
  for (std::size_t c = 0; c < d; ++c) {
    report.ledger.Add("coarse: univariate estimate, coordinate " +
                          std::to_string(c),
                      coordinate_budget.epsilon, 0.0, 0);
  }
  report.ledger.Add("fine: exponential mechanism over cover", epsilon, 0.0, 1);
  report.notes.push_back(
      "coarse and fine phases use disjoint people; parallel composition");
  report.seed = seed.value;
  return report;
}

}  // namespace dpmean
