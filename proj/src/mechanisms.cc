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
#include <map>
#include <sstream>

#include "dpmean/errors.h"

namespace dpmean {
namespace {

constexpr std::size_t kMaxBuckets = std::size_t{1} << 26;

}  // namespace

HistogramSpec HistogramSpec::Make(double bucket_width, double half_range) {
  if (!(bucket_width > 0.0) || !std::isfinite(bucket_width)) {
    throw ParameterError("bucket width must be a finite positive number");
  }
  if (!(half_range > 0.0) || !std::isfinite(half_range)) {
    throw ParameterError("histogram range must be a finite positive number");
  }
  const double ratio = half_range / bucket_width;
  if (ratio > static_cast<double>(kMaxBuckets)) {
    throw ScaleError("histogram would need more than 2^26 buckets");
  }
  // Small tolerance so that R/r = 5 computed as 5.000000000001 stays 5.
  const auto half_count =
      static_cast<std::int64_t>(std::ceil(ratio * (1.0 - 1e-12))) + 2;
  HistogramSpec spec;
  spec.bucket_width = bucket_width;
  spec.half_range = half_range;
  spec.first_index = -half_count;
  spec.num_buckets = static_cast<std::size_t>(2 * half_count);
  return spec;
}

std::optional<std::size_t> HistogramSpec::BucketOf(double x) const {
  if (!std::isfinite(x)) return std::nullopt;
  double j = std::floor(x / bucket_width);
  if (x < j * bucket_width) j -= 1.0;
  if (x >= (j + 1.0) * bucket_width) j += 1.0;
  const double offset = j - static_cast<double>(first_index);
  if (offset < 0.0 || offset >= static_cast<double>(num_buckets)) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(offset);
}

std::string NoisyHistogram::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "bucket_left,bucket_right,noisy_count,released\n";
  for (std::size_t b = 0; b < counts.size(); ++b) {
    out << spec.left(b) << ',' << spec.right(b) << ',' << counts[b] << ','
        << (released[b] ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<std::size_t> ExactCounts(std::span<const double> points,
                                     const HistogramSpec& spec) {
  std::vector<std::size_t> counts(spec.num_buckets, 0);
  for (double x : points) {
    if (auto b = spec.BucketOf(x)) ++counts[*b];
  }
  return counts;
}

double LaplaceNoise(double scale, Seed seed) {
  if (!(scale > 0.0)) throw ParameterError("Laplace scale must be > 0");
  Rng rng(seed, {kLaplaceStream});
  return scale * rng.Laplace();
}

double GaussianStddev(double l2_sensitivity, const PrivacyBudget& budget) {
  if (!(budget.delta > 0.0)) {
    throw ModeError("Gaussian mechanism needs delta > 0");
  }
  if (!(l2_sensitivity >= 0.0)) {
    throw ParameterError("sensitivity must be >= 0");
  }
  if (l2_sensitivity == 0.0) return 0.0;
  return l2_sensitivity * std::sqrt(2.0 * std::log(2.0 / budget.delta)) /
         budget.epsilon;
}

Vector GaussianMechanism(std::span<const double> value, double l2_sensitivity,
                         const PrivacyBudget& budget, Seed seed) {
  const double sigma = GaussianStddev(l2_sensitivity, budget);
  Vector out(value.begin(), value.end());
  if (sigma == 0.0) return out;
  Rng rng(seed, {kGaussianStream});
  for (double& v : out) v += sigma * rng.Normal();
  return out;
}

double StabilityThreshold(const PrivacyBudget& budget) {
  if (!(budget.delta > 0.0)) {
    throw ModeError("stability threshold needs delta > 0");
  }
  return 1.0 + 2.0 * std::log(2.0 / budget.delta) / budget.epsilon;
}

NoisyHistogram PrivateHistogram(std::span<const double> points,
                                const HistogramSpec& spec,
                                const PrivacyBudget& budget, Seed seed) {
  NoisyHistogram hist;
  hist.spec = spec;
  hist.counts.assign(spec.num_buckets, 0.0);
  hist.released.assign(spec.num_buckets, false);
  for (double x : points) {
    if (auto b = spec.BucketOf(x)) {
      hist.counts[*b] += 1.0;
    } else {
      ++hist.dropped;
    }
  }
  const double scale = 2.0 / budget.epsilon;
  const bool pure = budget.pure();
  const double threshold = pure ? 0.0 : StabilityThreshold(budget);
  for (std::size_t b = 0; b < spec.num_buckets; ++b) {
    if (pure) {
      if (scale > 0.0) {
        hist.counts[b] += scale * Rng(seed, {kHistogramStream, b}).Laplace();
      }
      hist.released[b] = true;
      continue;
    }
    if (hist.counts[b] == 0.0) continue;
    if (scale > 0.0) {
      hist.counts[b] += scale * Rng(seed, {kHistogramStream, b}).Laplace();
    }
    if (hist.counts[b] >= threshold) {
      hist.released[b] = true;
    } else {
      hist.counts[b] = 0.0;
    }
  }
  return hist;
}

ExponentialSampler::ExponentialSampler(double sensitivity, double epsilon,
                                       Seed seed)
    : sensitivity_(sensitivity), epsilon_(epsilon), seed_(seed) {
  if (!(sensitivity > 0.0)) {
    throw ParameterError("exponential mechanism sensitivity must be > 0");
  }
  if (!(epsilon >= 0.0)) {
    throw ParameterError("exponential mechanism epsilon must be >= 0");
  }
}

void ExponentialSampler::Offer(std::size_t index, double score) {
  double key;
  if (std::isinf(epsilon_)) {
    key = score;
  } else {
    key = epsilon_ * score / (2.0 * sensitivity_) +
          Rng(seed_, {kGumbelStream, index}).Gumbel();
  }
  if (!best_index_ || key > best_key_ ||
      (key == best_key_ && index < *best_index_)) {
    best_index_ = index;
    best_key_ = key;
  }
}

std::size_t ExponentialMechanism(std::span<const double> scores,
                                 double sensitivity, double epsilon,
                                 Seed seed) {
  if (scores.empty()) throw InputError("exponential mechanism needs candidates");
  ExponentialSampler sampler(sensitivity, epsilon, seed);
  for (std::size_t i = 0; i < scores.size(); ++i) sampler.Offer(i, scores[i]);
  return *sampler.selected();
}

PrivacyBudget LedgerTotal(const BudgetLedger& ledger) {
  PrivacyBudget total{0.0, 0.0};
  if (ledger.entries.empty()) return total;
  if (ledger.mode == CompositionMode::kBasic) {
    std::map<int, PrivacyBudget> per_partition;
    for (const auto& e : ledger.entries) {
      auto& slot = per_partition.try_emplace(e.partition, PrivacyBudget{0, 0})
                       .first->second;
      slot.epsilon += e.epsilon;
      slot.delta += e.delta;
    }
    for (const auto& [partition, budget] : per_partition) {
      total.epsilon = std::max(total.epsilon, budget.epsilon);
      total.delta = std::max(total.delta, budget.delta);
    }
    return total;
  }
  if (!(ledger.delta0 > 0.0 && ledger.delta0 < 1.0)) {
    throw ModeError("advanced composition needs delta0 in (0, 1)");
  }
  const double eps0 = ledger.entries.front().epsilon;
  if (eps0 > 1.0) {
    throw ModeError("advanced composition needs per-step epsilon <= 1");
  }
  double delta_sum = 0.0;
  for (const auto& e : ledger.entries) {
    if (e.epsilon != eps0) {
      throw ModeError("advanced composition needs a common per-step epsilon");
    }
    delta_sum += e.delta;
  }
  const double t = static_cast<double>(ledger.entries.size());
  total.epsilon = eps0 * std::sqrt(6.0 * t * std::log(1.0 / ledger.delta0));
  total.delta = ledger.delta0 + delta_sum;
  return total;
}

}  // namespace dpmean
