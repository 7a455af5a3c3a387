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

// Domain types shared by every estimator: datasets of n people with m samples
// each, privacy budgets, problem parameters and clipping balls.

#ifndef DPMEAN_CORE_H_
#define DPMEAN_CORE_H_

#include <cstddef>
#include <span>
#include <vector>

namespace dpmean {

using Vector = std::vector<double>;

// n people x m samples x d dimensions, stored person-major:
// values[(i * m + j) * d + c].
class PersonDataset {
 public:
  PersonDataset(std::size_t n, std::size_t m, std::size_t d, Vector values);

  // A dataset known only through its per-person averages (n x d), each the
  // mean of m samples. Every estimator reads people through PersonMeans, so
  // this form runs them unchanged; at() and person() are unavailable.
  static PersonDataset FromPersonMeans(std::size_t n, std::size_t m,
                                       std::size_t d, Vector means);

  bool summarized() const { return summarized_; }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t d() const { return d_; }

  double at(std::size_t person, std::size_t sample, std::size_t coord) const {
    return values_[(person * m_ + sample) * d_ + coord];
  }
  // All m*d values of one person. Throws InputError on a summarized dataset.
  std::span<const double> person(std::size_t i) const;
  const Vector& values() const { return values_; }

  // Per-person sample averages, n x d row-major.
  Vector PersonMeans() const;

  // Grand mean over all n*m samples.
  Vector GrandMean() const;

  // People [begin, end) as a new dataset.
  PersonDataset People(std::size_t begin, std::size_t end) const;

  // One coordinate as a d = 1 dataset.
  PersonDataset Coordinate(std::size_t coord) const;

  // Same people with `shift` subtracted from every sample.
  PersonDataset Shifted(std::span<const double> shift) const;

 private:
  std::size_t n_;
  std::size_t m_;
  std::size_t d_;
  Vector values_;
  bool summarized_ = false;

  // Row stride of values_: m*d, or d when summarized.
  std::size_t stride() const { return summarized_ ? d_ : m_ * d_; }
};

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;

  // Validates epsilon > 0 (infinity allowed for noiseless runs) and
  // 0 <= delta < 1.
  static PrivacyBudget Make(double epsilon, double delta);

  bool pure() const { return delta == 0.0; }
};

struct ProblemParams {
  double k = 4.0;
  double alpha = 0.1;
  double beta = 0.1;
  double range_R = 4.0;

  static ProblemParams Make(double k, double alpha, double beta,
                            double range_R);
};

struct ClipBall {
  Vector center;
  double radius = 0.0;

  static ClipBall Make(Vector center, double radius);
};

double Norm2(std::span<const double> x);
double Distance2(std::span<const double> x, std::span<const double> y);
double Dot(std::span<const double> x, std::span<const double> y);

}  // namespace dpmean

#endif  // DPMEAN_CORE_H_
