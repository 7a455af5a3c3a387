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

#include "dpmean/clipping.h"

#include <algorithm>
#include <cmath>

#include "dpmean/errors.h"
#include "dpmean/parallel.h"

namespace dpmean {
namespace {

constexpr std::size_t kMinTrials = 100000;

// Running sums for one Monte Carlo chunk.
struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;

  void Add(double x) {
    sum += x;
    sum_sq += x * x;
  }
};

double Mean(const Moments& s, double count) { return s.sum / count; }

double StdError(const Moments& s, double count) {
  const double mean = s.sum / count;
  const double var = std::max(0.0, s.sum_sq / count - mean * mean);
  return std::sqrt(var * count / (count - 1.0) / count);
}

void CheckBall(const ClipBall& ball, std::size_t d) {
  if (ball.center.size() != d) {
    throw ParameterError("clip ball center has wrong dimension");
  }
  if (!(ball.radius >= 0.0)) throw ParameterError("clip radius must be >= 0");
}

}  // namespace

double Trunc1d(double x, double lo, double hi) {
  if (lo > hi) throw ParameterError("truncation needs lo <= hi");
  return std::min(std::max(x, lo), hi);
}

void ClipInPlace(std::span<double> x, const ClipBall& ball) {
  const double dist = Distance2(x, ball.center);
  if (dist <= ball.radius) return;
  const double scale = ball.radius / dist;
  for (std::size_t c = 0; c < x.size(); ++c) {
    x[c] = ball.center[c] + scale * (x[c] - ball.center[c]);
  }
}

Vector ClipToBall(std::span<const double> x, const ClipBall& ball) {
  CheckBall(ball, x.size());
  Vector out(x.begin(), x.end());
  ClipInPlace(out, ball);
  return out;
}

double ClippingBiasThreshold(double k, std::size_t m) {
  const double md = static_cast<double>(m);
  return std::sqrt((k - 1.0) * std::log(md) / md);
}

double ClippingBiasBound(double k, std::size_t m, double gap) {
  const double md = static_cast<double>(m);
  return std::pow(md, -k + 1.0) * std::pow(gap, -k + 1.0) / (k - 1.0);
}

BiasEstimate BiasOracle1d(const SyntheticSpec& spec, std::size_t m,
                          const ClipBall& ball, std::size_t trials,
                          Seed seed) {
  spec.Validate();
  if (spec.dim() != 1) throw ParameterError("bias oracle is univariate");
  if (m == 0) throw ParameterError("m must be >= 1");
  if (trials < kMinTrials) throw ParameterError("bias oracle needs >= 1e5 trials");
  CheckBall(ball, 1);
  const double mu = DistributionMean(spec)[0];
  const double lo = ball.center[0] - ball.radius;
  const double hi = ball.center[0] + ball.radius;
  std::vector<Moments> chunks(kMonteCarloChunks);
  ParallelFor(kMonteCarloChunks, [&](std::size_t c) {
    Rng rng(seed, {kMonteCarloStream, c});
    const ChunkBounds range = Chunk(trials, kMonteCarloChunks, c);
    double draw = 0.0;
    for (std::size_t t = range.begin; t < range.end; ++t) {
      SampleBatchMean(spec, m, rng, {&draw, 1});
      chunks[c].Add(std::min(std::max(draw, lo), hi) - mu);
    }
  });
  Moments total;
  for (const auto& c : chunks) {
    total.sum += c.sum;
    total.sum_sq += c.sum_sq;
  }
  const double count = static_cast<double>(trials);
  BiasEstimate out;
  out.signed_bias = Mean(total, count);
  out.bias = std::abs(out.signed_bias);
  out.std_error = StdError(total, count);
  out.u_err = std::abs(ball.center[0] - mu);
  const double gap = ball.radius - out.u_err;
  if (gap > 0.0 && gap >= ClippingBiasThreshold(spec.k, m)) {
    out.analytic_bound = ClippingBiasBound(spec.k, m, gap);
  }
  return out;
}

VarianceContraction VarianceContractionCheck(const SyntheticSpec& spec,
                                             const ClipBall& ball,
                                             std::size_t trials, Seed seed) {
  spec.Validate();
  if (trials < kMinTrials) {
    throw ParameterError("variance check needs >= 1e5 trials");
  }
  const std::size_t d = spec.dim();
  CheckBall(ball, d);
  // Two passes: means, then squared deviations, with identical streams.
  auto run = [&](const Vector* center_raw, const Vector* center_clip,
                 std::vector<Vector>& sum_raw, std::vector<Vector>& sum_clip,
                 std::vector<Moments>& dev_raw,
                 std::vector<Moments>& dev_clip) {
    ParallelFor(kMonteCarloChunks, [&](std::size_t c) {
      Rng rng(seed, {kMonteCarloStream, c});
      const ChunkBounds range = Chunk(trials, kMonteCarloChunks, c);
      Vector x(d);
      Vector z(d);
      sum_raw[c].assign(d, 0.0);
      sum_clip[c].assign(d, 0.0);
      for (std::size_t t = range.begin; t < range.end; ++t) {
        SampleOne(spec, rng, x);
        z = x;
        ClipInPlace(z, ball);
        if (center_raw == nullptr) {
          for (std::size_t i = 0; i < d; ++i) {
            sum_raw[c][i] += x[i];
            sum_clip[c][i] += z[i];
          }
        } else {
          double a = 0.0;
          double b = 0.0;
          for (std::size_t i = 0; i < d; ++i) {
            a += (x[i] - (*center_raw)[i]) * (x[i] - (*center_raw)[i]);
            b += (z[i] - (*center_clip)[i]) * (z[i] - (*center_clip)[i]);
          }
          dev_raw[c].Add(a);
          dev_clip[c].Add(b);
        }
      }
    });
  };
  std::vector<Vector> sum_raw(kMonteCarloChunks);
  std::vector<Vector> sum_clip(kMonteCarloChunks);
  std::vector<Moments> dev_raw(kMonteCarloChunks);
  std::vector<Moments> dev_clip(kMonteCarloChunks);
  run(nullptr, nullptr, sum_raw, sum_clip, dev_raw, dev_clip);
  const double count = static_cast<double>(trials);
  Vector mean_raw(d, 0.0);
  Vector mean_clip(d, 0.0);
  for (std::size_t c = 0; c < kMonteCarloChunks; ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      mean_raw[i] += sum_raw[c][i] / count;
      mean_clip[i] += sum_clip[c][i] / count;
    }
  }
  run(&mean_raw, &mean_clip, sum_raw, sum_clip, dev_raw, dev_clip);
  Moments raw;
  Moments clip;
  for (std::size_t c = 0; c < kMonteCarloChunks; ++c) {
    raw.sum += dev_raw[c].sum;
    raw.sum_sq += dev_raw[c].sum_sq;
    clip.sum += dev_clip[c].sum;
    clip.sum_sq += dev_clip[c].sum_sq;
  }
  VarianceContraction out;
  out.var_raw = Mean(raw, count) * count / (count - 1.0);
  out.var_clipped = Mean(clip, count) * count / (count - 1.0);
  out.std_error_raw = StdError(raw, count);
  out.std_error_clipped = StdError(clip, count);
  return out;
}

}  // namespace dpmean
