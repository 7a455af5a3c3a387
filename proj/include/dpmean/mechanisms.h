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

#ifndef DPMEAN_MECHANISMS_H_
#define DPMEAN_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpmean/core.h"
#include "dpmean/random.h"

namespace dpmean {

// Buckets [j*r, (j+1)*r) for j in [first_index, first_index + num_buckets).
// The grid is anchored at zero and covers [-R-2r, R+2r); when R/r is an
// integer the first bucket starts exactly at -R-2r.
struct HistogramSpec {
  double bucket_width = 1.0;
  double half_range = 1.0;
  std::int64_t first_index = 0;
  std::size_t num_buckets = 0;

  static HistogramSpec Make(double bucket_width, double half_range);

  double left(std::size_t b) const {
    return static_cast<double>(first_index + static_cast<std::int64_t>(b)) *
           bucket_width;
  }
  double right(std::size_t b) const { return left(b) + bucket_width; }
  double midpoint(std::size_t b) const {
    return left(b) + 0.5 * bucket_width;
  }

  // Bucket holding x under the [a, b) convention, or nullopt outside the grid.
  std::optional<std::size_t> BucketOf(double x) const;
};

struct NoisyHistogram {
  HistogramSpec spec;
  std::vector<double> counts;
  std::vector<bool> released;
  // Points that fell outside the grid.
  std::size_t dropped = 0;

  // Header bucket_left,bucket_right,noisy_count,released.
  std::string ToCsv() const;
};

// Exact (noiseless) bucket counts; points outside the grid are ignored.
std::vector<std::size_t> ExactCounts(std::span<const double> points,
                                     const HistogramSpec& spec);

double LaplaceNoise(double scale, Seed seed);

// Per-coordinate noise stddev l2_sensitivity * sqrt(2 ln(2/delta)) / epsilon.
double GaussianStddev(double l2_sensitivity, const PrivacyBudget& budget);

Vector GaussianMechanism(std::span<const double> value, double l2_sensitivity,
                         const PrivacyBudget& budget, Seed seed);

// Release threshold 1 + 2 ln(2/delta) / epsilon of the stability histogram.
double StabilityThreshold(const PrivacyBudget& budget);

// delta = 0: Laplace(2/epsilon) on every bucket, all released.
// delta > 0: Laplace(2/epsilon) on nonzero buckets only; a bucket is released
// iff its noisy count reaches StabilityThreshold. Suppressed buckets report
// a count of 0.
NoisyHistogram PrivateHistogram(std::span<const double> points,
                                const HistogramSpec& spec,
                                const PrivacyBudget& budget, Seed seed);

// Streaming exponential mechanism. Candidate i gets key
// epsilon * score / (2 * sensitivity) + G_i, where G_i is a standard Gumbel
// drawn from (seed, i); the argmax of the keys is an exact sample. Ties go to
// the lowest index. epsilon = infinity selects the plain argmax.
class ExponentialSampler {
 public:
  ExponentialSampler(double sensitivity, double epsilon, Seed seed);

  void Offer(std::size_t index, double score);

  std::optional<std::size_t> selected() const { return best_index_; }

 private:
  double sensitivity_;
  double epsilon_;
  Seed seed_;
  std::optional<std::size_t> best_index_;
  double best_key_ = 0.0;
};

std::size_t ExponentialMechanism(std::span<const double> scores,
                                 double sensitivity, double epsilon,
                                 Seed seed);

struct LedgerEntry {
  std::string label;
  double epsilon = 0.0;
  double delta = 0.0;
  // Entries with different partitions touch disjoint people and compose in
  // parallel.
  int partition = 0;
};

enum class CompositionMode { kBasic, kAdvanced };

struct BudgetLedger {
  CompositionMode mode = CompositionMode::kBasic;
  double delta0 = 0.0;  // advanced mode slack
  std::vector<LedgerEntry> entries;

  void Add(std::string label, double epsilon, double delta,
           int partition = 0) {
    entries.push_back({std::move(label), epsilon, delta, partition});
  }
};

// Basic: (sum eps, sum delta), maximized over partitions.
// Advanced: every entry must share eps0 <= 1; returns
// (eps0 * sqrt(6 t ln(1/delta0)), delta0 + sum delta). Empty ledger: (0, 0).
PrivacyBudget LedgerTotal(const BudgetLedger& ledger);

}  // namespace dpmean

#endif  // DPMEAN_MECHANISMS_H_
