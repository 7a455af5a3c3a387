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

#include "dpmean/core.h"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "dpmean/errors.h"

namespace dpmean {

PersonDataset::PersonDataset(std::size_t n, std::size_t m, std::size_t d,
                             Vector values)
    : n_(n), m_(m), d_(d), values_(std::move(values)) {
  if (n_ == 0 || m_ == 0 || d_ == 0) {
    throw InputError("dataset needs n, m, d >= 1");
  }
  if (values_.size() != n_ * m_ * d_) {
    throw InputError("dataset has " + std::to_string(values_.size()) +
                     " values, expected n*m*d = " +
                     std::to_string(n_ * m_ * d_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("dataset contains NaN or Inf");
  }
}

PersonDataset PersonDataset::FromPersonMeans(std::size_t n, std::size_t m,
                                             std::size_t d, Vector means) {
  if (n == 0 || m == 0 || d == 0) {
    throw InputError("dataset needs n, m, d >= 1");
  }
  if (means.size() != n * d) {
    throw InputError("expected n*d = " + std::to_string(n * d) +
                     " person means, got " + std::to_string(means.size()));
  }
  PersonDataset out(n, 1, d, std::move(means));
  out.m_ = m;
  out.summarized_ = true;
  return out;
}

std::span<const double> PersonDataset::person(std::size_t i) const {
  if (summarized_) {
    throw InputError("summarized dataset has no per-sample values");
  }
  return {values_.data() + i * m_ * d_, m_ * d_};
}

Vector PersonDataset::PersonMeans() const {
  if (summarized_) return values_;
  Vector means(n_ * d_, 0.0);
  const double inv_m = 1.0 / static_cast<double>(m_);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = values_.data() + i * m_ * d_;
    double* out = means.data() + i * d_;
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t c = 0; c < d_; ++c) out[c] += row[j * d_ + c];
    }
    for (std::size_t c = 0; c < d_; ++c) out[c] *= inv_m;
  }
  return means;
}

Vector PersonDataset::GrandMean() const {
  const Vector means = PersonMeans();
  Vector grand(d_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t c = 0; c < d_; ++c) grand[c] += means[i * d_ + c];
  }
  for (double& g : grand) g /= static_cast<double>(n_);
  return grand;
}

PersonDataset PersonDataset::People(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > n_) throw InputError("bad person range");
  const std::size_t row = stride();
  Vector values(values_.begin() + static_cast<std::ptrdiff_t>(begin * row),
                values_.begin() + static_cast<std::ptrdiff_t>(end * row));
  if (summarized_) {
    return FromPersonMeans(end - begin, m_, d_, std::move(values));
  }
  return PersonDataset(end - begin, m_, d_, std::move(values));
}

PersonDataset PersonDataset::Coordinate(std::size_t coord) const {
  if (coord >= d_) throw InputError("coordinate out of range");
  const std::size_t rows = values_.size() / d_;
  Vector values(rows);
  for (std::size_t s = 0; s < rows; ++s) values[s] = values_[s * d_ + coord];
  if (summarized_) return FromPersonMeans(n_, m_, 1, std::move(values));
  return PersonDataset(n_, m_, 1, std::move(values));
}

PersonDataset PersonDataset::Shifted(std::span<const double> shift) const {
  if (shift.size() != d_) throw InputError("shift dimension mismatch");
  Vector values = values_;
  const std::size_t rows = values_.size() / d_;
  for (std::size_t s = 0; s < rows; ++s) {
    for (std::size_t c = 0; c < d_; ++c) values[s * d_ + c] -= shift[c];
  }
  if (summarized_) return FromPersonMeans(n_, m_, d_, std::move(values));
  return PersonDataset(n_, m_, d_, std::move(values));
}

PrivacyBudget PrivacyBudget::Make(double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw ParameterError("delta must be in [0, 1)");
  }
  return PrivacyBudget{epsilon, delta};
}

ProblemParams ProblemParams::Make(double k, double alpha, double beta,
                                  double range_R) {
  if (!(k > 2.0)) throw ParameterError("moment order k must be > 2");
  if (!(alpha > 0.0)) throw ParameterError("alpha must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ParameterError("beta must be in (0, 1)");
  }
  if (!(range_R > 0.0)) throw ParameterError("range R must be > 0");
  return ProblemParams{k, alpha, beta, range_R};
}

ClipBall ClipBall::Make(Vector center, double radius) {
  if (!(radius >= 0.0)) throw ParameterError("clip radius must be >= 0");
  for (double c : center) {
    if (!std::isfinite(c)) throw ParameterError("clip center must be finite");
  }
  return ClipBall{std::move(center), radius};
}

double Norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double Distance2(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double Dot(std::span<const double> x, std::span<const double> y) {
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

}  // namespace dpmean
