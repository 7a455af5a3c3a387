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

// Deterministic randomness.
//
// Every randomized operation takes a Seed. Independent streams are obtained
// by hashing a derivation path onto the seed:
//
//   key(seed, p_1, ..., p_j) = mix(... mix(mix(seed) ^ mix(p_1 + c)) ...)
//
// where mix is the SplitMix64 finalizer and c is the golden-ratio increment.
// Each key seeds a xoshiro256** generator (state filled by SplitMix64 from the
// key). Datasets use the path (seed, kDatasetStream, person); mechanisms and
// pipeline stages use their own stream tags, so results never depend on
// evaluation order or thread count.
//
// Continuous variates are produced by hand-written transforms (inverse CDF,
// Box-Muller, Marsaglia-Tsang) rather than <random> distributions, whose output
// is implementation-defined.

#ifndef DPMEAN_RANDOM_H_
#define DPMEAN_RANDOM_H_

#include <cstdint>
#include <initializer_list>

namespace dpmean {

struct Seed {
  std::uint64_t value = 0;
};

// Stream tags used in derivation paths.
enum StreamTag : std::uint64_t {
  kDatasetStream = 0x100,
  kMomentStream = 0x101,
  kLaplaceStream = 0x200,
  kGaussianStream = 0x201,
  kHistogramStream = 0x202,
  kGumbelStream = 0x203,
  kCoarseStream = 0x300,
  kFineStream = 0x301,
  kRoundStream = 0x302,
  kCoordinateStream = 0x303,
  kMonteCarloStream = 0x400,
  kTrialStream = 0x500,
};

std::uint64_t SplitMix64(std::uint64_t x);

// Hashes a derivation path onto a seed.
Seed Derive(Seed seed, std::initializer_list<std::uint64_t> path);

class Rng {
 public:
  explicit Rng(Seed seed);
  Rng(Seed seed, std::initializer_list<std::uint64_t> path)
      : Rng(Derive(seed, path)) {}

  std::uint64_t NextU64();

  // Uniform on the open interval (0, 1); 53 bits of resolution.
  double Uniform();

  double Normal();

  // Standard Laplace (scale 1) via inverse CDF from one uniform.
  double Laplace();

  // Standard Gumbel via -log(-log U).
  double Gumbel();

  // Gamma(shape, 1), Marsaglia-Tsang.
  double Gamma(double shape);

  // Binomial(trials, p) by sequential inverse CDF from one uniform.
  std::uint64_t Binomial(std::uint64_t trials, double p);

 private:
  std::uint64_t s_[4];
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace dpmean

#endif  // DPMEAN_RANDOM_H_
