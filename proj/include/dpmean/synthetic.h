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

// Synthetic heavy-tailed distributions with k-th moment bounded by one, and a
// Monte Carlo check of that bound.
//
// Families:
//   scaled_gaussian     N(mean, I / sigma_k^2) with sigma_k the k-th absolute
//                       moment of N(0, 1) to the power 1/k.
//   point_mass_mixture  0 w.p. 1 - lambda, atom * v w.p. lambda, shifted by
//                       `mean`, with lambda = 25 alpha^(k/(k-1)) and
//                       atom = 1 / (6 alpha^(1/(k-1))). Its mean is
//                       mean + lambda * atom * v.
//   student_t           Multivariate t with `dof` degrees of freedom, scaled
//                       so every projection has k-th absolute moment 1.

#ifndef DPMEAN_SYNTHETIC_H_
#define DPMEAN_SYNTHETIC_H_

#include <cstddef>
#include <optional>
#include <string>

#include "dpmean/core.h"
#include "dpmean/random.h"
#include "json.hpp"

namespace dpmean {

enum class Family { kScaledGaussian, kPointMassMixture, kStudentT };

std::string FamilyName(Family family);
Family ParseFamily(const std::string& name);

struct SyntheticSpec {
  Family family = Family::kScaledGaussian;
  Vector mean = {0.0};
  double k = 4.0;
  // point_mass_mixture
  double alpha = 0.0;
  Vector direction;  // unit vector; defaults to e_1
  std::optional<double> lambda_override;
  // student_t
  double dof = 0.0;

  std::size_t dim() const { return mean.size(); }

  static SyntheticSpec ScaledGaussian(Vector mean, double k);
  static SyntheticSpec PointMassMixture(Vector mean, double k, double alpha,
                                        Vector direction = {});
  static SyntheticSpec StudentT(Vector mean, double k, double dof);

  // Throws ConfigError on invalid family parameters.
  void Validate() const;
};

// sigma_k(N(0,1)) = E[|Z|^k]^(1/k).
double GaussianAbsMoment(double k);

// Mixture weight and atom length of the point-mass construction.
double PointMassLambda(const SyntheticSpec& spec);
double PointMassAtom(const SyntheticSpec& spec);

// The true mean of the distribution described by spec.
Vector DistributionMean(const SyntheticSpec& spec);

// One draw, written to out (size spec.dim()).
void SampleOne(const SyntheticSpec& spec, Rng& rng, std::span<double> out);

// The average of m i.i.d. draws. Uses exact distributional identities where
// they exist (Gaussian sums, binomial atom counts) and falls back to m draws.
void SampleBatchMean(const SyntheticSpec& spec, std::size_t m, Rng& rng,
                     std::span<double> out);

// n x m x d dataset. Person i draws from the stream (seed, kDatasetStream, i).
PersonDataset SampleDataset(const SyntheticSpec& spec, std::size_t n,
                            std::size_t m, Seed seed);

// Same law as SampleDataset's per-person averages, drawn directly with
// SampleBatchMean (person i on stream (seed, kDatasetStream, i)). The values
// differ from SampleDataset's for the same seed.
PersonDataset SamplePersonMeans(const SyntheticSpec& spec, std::size_t n,
                                std::size_t m, Seed seed);

// Monte Carlo estimate of sup_v E[|<X - mu, v>|^k]^(1/k) over a fixed direction
// grid: the single direction for d = 1, coordinate axes plus 64 quasi-uniform
// directions otherwise.
double CheckMoment(const SyntheticSpec& spec, double k, std::size_t trials,
                   Seed seed);

// The fixed direction grid used by CheckMoment.
std::vector<Vector> MomentDirections(std::size_t d);

// JSON with keys family, mean, k, extra.
nlohmann::json ToJson(const SyntheticSpec& spec);
SyntheticSpec SpecFromJson(const nlohmann::json& j);

}  // namespace dpmean

#endif  // DPMEAN_SYNTHETIC_H_
