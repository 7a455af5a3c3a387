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

#ifndef DPMEAN_CLIPPING_H_
#define DPMEAN_CLIPPING_H_

#include <cstddef>
#include <optional>
#include <span>

#include "dpmean/core.h"
#include "dpmean/random.h"
#include "dpmean/synthetic.h"

namespace dpmean {

// min(max(x, lo), hi). Throws ParameterError if lo > hi.
double Trunc1d(double x, double lo, double hi);

// Projection of x onto the ball: x itself when ||x - u|| <= rho, else
// u + rho (x - u) / ||x - u||.
Vector ClipToBall(std::span<const double> x, const ClipBall& ball);
void ClipInPlace(std::span<double> x, const ClipBall& ball);

struct BiasEstimate {
  // |E[Trunc(mean of m draws)] - mu|, Monte Carlo.
  double bias = 0.0;
  double signed_bias = 0.0;
  double std_error = 0.0;
  // |center - mu|.
  double u_err = 0.0;
  // m^{-k+1} (rho - u_err)^{-k+1} / (k - 1) when
  // rho - u_err >= sqrt((k - 1) ln m / m); nullopt otherwise.
  std::optional<double> analytic_bound;
};

// Requires a d = 1 spec and trials >= 10^5.
BiasEstimate BiasOracle1d(const SyntheticSpec& spec, std::size_t m,
                          const ClipBall& ball, std::size_t trials, Seed seed);

double ClippingBiasBound(double k, std::size_t m, double gap);
double ClippingBiasThreshold(double k, std::size_t m);

struct VarianceContraction {
  // Total variance E||X - EX||^2 before and after clipping one draw.
  double var_raw = 0.0;
  double var_clipped = 0.0;
  double std_error_raw = 0.0;
  double std_error_clipped = 0.0;
};

VarianceContraction VarianceContractionCheck(const SyntheticSpec& spec,
                                             const ClipBall& ball,
                                             std::size_t trials, Seed seed);

}  // namespace dpmean

#endif  // DPMEAN_CLIPPING_H_
