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

#include "dpmean/synthetic.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "dpmean/errors.h"

namespace dpmean {
namespace {

Vector UnitE1(std::size_t d) {
  Vector v(d, 0.0);
  v[0] = 1.0;
  return v;
}

// E|T|^k for Student-t with dof degrees of freedom (dof > k).
double StudentAbsMoment(double k, double dof) {
  return std::exp(0.5 * k * std::log(dof) + std::lgamma(0.5 * (k + 1.0)) +
                  std::lgamma(0.5 * (dof - k)) -
                  0.5 * std::log(std::numbers::pi) - std::lgamma(0.5 * dof));
}

double StudentScale(const SyntheticSpec& spec) {
  return 1.0 / std::pow(StudentAbsMoment(spec.k, spec.dof), 1.0 / spec.k);
}

}  // namespace

std::string FamilyName(Family family) {
  switch (family) {
    case Family::kScaledGaussian:
      return "scaled_gaussian";
    case Family::kPointMassMixture:
      return "point_mass_mixture";
    case Family::kStudentT:
      return "student_t";
  }
  return "unknown";
}

Family ParseFamily(const std::string& name) {
  if (name == "scaled_gaussian") return Family::kScaledGaussian;
  if (name == "point_mass_mixture") return Family::kPointMassMixture;
  if (name == "student_t") return Family::kStudentT;
  throw ConfigError("unknown distribution family '" + name + "'");
}

SyntheticSpec SyntheticSpec::ScaledGaussian(Vector mean, double k) {
  SyntheticSpec spec;
  spec.family = Family::kScaledGaussian;
  spec.mean = std::move(mean);
  spec.k = k;
  spec.Validate();
  return spec;
}

SyntheticSpec SyntheticSpec::PointMassMixture(Vector mean, double k,
                                              double alpha, Vector direction) {
  SyntheticSpec spec;
  spec.family = Family::kPointMassMixture;
  spec.mean = std::move(mean);
  spec.k = k;
  spec.alpha = alpha;
  spec.direction =
      direction.empty() ? UnitE1(spec.mean.size()) : std::move(direction);
  spec.Validate();
  return spec;
}

SyntheticSpec SyntheticSpec::StudentT(Vector mean, double k, double dof) {
  SyntheticSpec spec;
  spec.family = Family::kStudentT;
  spec.mean = std::move(mean);
  spec.k = k;
  spec.dof = dof;
  spec.Validate();
  return spec;
}

void SyntheticSpec::Validate() const {
  if (mean.empty()) throw ConfigError("spec mean must have dimension >= 1");
  for (double v : mean) {
    if (!std::isfinite(v)) throw ConfigError("spec mean must be finite");
  }
  if (!(k >= 2.0) || !std::isfinite(k)) {
    throw ConfigError("spec moment order k must be a finite real >= 2");
  }
  switch (family) {
    case Family::kScaledGaussian:
      break;
    case Family::kPointMassMixture: {
      if (direction.size() != mean.size()) {
        throw ConfigError("point-mass direction has wrong dimension");
      }
      if (std::abs(Norm2(direction) - 1.0) > 1e-9) {
        throw ConfigError("point-mass direction must be a unit vector");
      }
      if (lambda_override) {
        if (!(*lambda_override >= 0.0 && *lambda_override <= 1.0)) {
          throw ConfigError("point-mass lambda must be in [0, 1]");
        }
        if (*lambda_override > 0.0 && !(alpha > 0.0)) {
          throw ConfigError("point-mass alpha must be > 0");
        }
        break;
      }
      if (!(alpha > 0.0)) throw ConfigError("point-mass alpha must be > 0");
      const double lambda = PointMassLambda(*this);
      if (lambda > 1.0) {
        throw ConfigError("point-mass lambda = 25 alpha^(k/(k-1)) = " +
                          std::to_string(lambda) + " exceeds 1");
      }
      break;
    }
    case Family::kStudentT:
      if (!(dof > k)) {
        throw ConfigError("student_t degrees of freedom must exceed k");
      }
      break;
  }
}

double GaussianAbsMoment(double k) {
  // E|Z|^k = 2^(k/2) Gamma((k+1)/2) / sqrt(pi).
  const double log_moment = 0.5 * k * std::log(2.0) +
                            std::lgamma(0.5 * (k + 1.0)) -
                            0.5 * std::log(std::numbers::pi);
  return std::exp(log_moment / k);
}

double PointMassLambda(const SyntheticSpec& spec) {
  if (spec.lambda_override) return *spec.lambda_override;
  return 25.0 * std::pow(spec.alpha, spec.k / (spec.k - 1.0));
}

double PointMassAtom(const SyntheticSpec& spec) {
  if (!(spec.alpha > 0.0)) return 0.0;
  return 1.0 / (6.0 * std::pow(spec.alpha, 1.0 / (spec.k - 1.0)));
}

Vector DistributionMean(const SyntheticSpec& spec) {
  Vector mu = spec.mean;
  if (spec.family == Family::kPointMassMixture) {
    const double shift = PointMassLambda(spec) * PointMassAtom(spec);
    for (std::size_t c = 0; c < mu.size(); ++c) {
      mu[c] += shift * spec.direction[c];
    }
  }
  return mu;
}

void SampleOne(const SyntheticSpec& spec, Rng& rng, std::span<double> out) {
  const std::size_t d = spec.dim();
  switch (spec.family) {
    case Family::kScaledGaussian: {
      const double scale = 1.0 / GaussianAbsMoment(spec.k);
      for (std::size_t c = 0; c < d; ++c) {
        out[c] = spec.mean[c] + scale * rng.Normal();
      }
      return;
    }
    case Family::kPointMassMixture: {
      const bool hit = rng.Uniform() < PointMassLambda(spec);
      const double atom = hit ? PointMassAtom(spec) : 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        out[c] = spec.mean[c] + atom * spec.direction[c];
      }
      return;
    }
    case Family::kStudentT: {
      const double w = 2.0 * rng.Gamma(0.5 * spec.dof);
      const double scale = StudentScale(spec) * std::sqrt(spec.dof / w);
      for (std::size_t c = 0; c < d; ++c) {
        out[c] = spec.mean[c] + scale * rng.Normal();
      }
      return;
    }
  }
}

void SampleBatchMean(const SyntheticSpec& spec, std::size_t m, Rng& rng,
                     std::span<double> out) {
  const std::size_t d = spec.dim();
  switch (spec.family) {
    case Family::kScaledGaussian: {
      const double scale =
          1.0 / (GaussianAbsMoment(spec.k) * std::sqrt(static_cast<double>(m)));
      for (std::size_t c = 0; c < d; ++c) {
        out[c] = spec.mean[c] + scale * rng.Normal();
      }
      return;
    }
    case Family::kPointMassMixture: {
      const double hits =
          static_cast<double>(rng.Binomial(m, PointMassLambda(spec)));
      const double len = PointMassAtom(spec) * hits / static_cast<double>(m);
      for (std::size_t c = 0; c < d; ++c) {
        out[c] = spec.mean[c] + len * spec.direction[c];
      }
      return;
    }
    case Family::kStudentT: {
      Vector draw(d);
      for (std::size_t c = 0; c < d; ++c) out[c] = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        SampleOne(spec, rng, draw);
        for (std::size_t c = 0; c < d; ++c) out[c] += draw[c];
      }
      for (std::size_t c = 0; c < d; ++c) out[c] /= static_cast<double>(m);
      return;
    }
  }
}

PersonDataset SampleDataset(const SyntheticSpec& spec, std::size_t n,
                            std::size_t m, Seed seed) {
  spec.Validate();
  if (n == 0 || m == 0) throw ConfigError("n and m must be >= 1");
  const std::size_t d = spec.dim();
  Vector values(n * m * d);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, {kDatasetStream, i});
    for (std::size_t j = 0; j < m; ++j) {
      SampleOne(spec, rng, std::span<double>(values).subspan((i * m + j) * d, d));
    }
  }
  return PersonDataset(n, m, d, std::move(values));
}

PersonDataset SamplePersonMeans(const SyntheticSpec& spec, std::size_t n,
                                std::size_t m, Seed seed) {
  spec.Validate();
  if (n == 0 || m == 0) throw ConfigError("n and m must be >= 1");
  const std::size_t d = spec.dim();
  Vector means(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, {kDatasetStream, i});
    SampleBatchMean(spec, m, rng, std::span<double>(means).subspan(i * d, d));
  }
  return PersonDataset::FromPersonMeans(n, m, d, std::move(means));
}

std::vector<Vector> MomentDirections(std::size_t d) {
  std::vector<Vector> dirs;
  if (d == 1) {
    dirs.push_back({1.0});
    return dirs;
  }
  for (std::size_t c = 0; c < d; ++c) {
    Vector e(d, 0.0);
    e[c] = 1.0;
    dirs.push_back(std::move(e));
  }
  constexpr int kGridSize = 64;
  if (d == 2) {
    for (int i = 0; i < kGridSize; ++i) {
      const double angle = std::numbers::pi * (i + 0.5) / kGridSize;
      dirs.push_back({std::cos(angle), std::sin(angle)});
    }
  } else if (d == 3) {
    // Fibonacci sphere.
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < kGridSize; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / kGridSize;
      const double r = std::sqrt(1.0 - z * z);
      const double phi = golden_angle * i;
      dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
  } else {
    Rng rng(Seed{0x5EED}, {kMomentStream, d});
    for (int i = 0; i < kGridSize; ++i) {
      Vector v(d);
      for (double& x : v) x = rng.Normal();
      const double norm = Norm2(v);
      for (double& x : v) x /= norm;
      dirs.push_back(std::move(v));
    }
  }
  return dirs;
}

double CheckMoment(const SyntheticSpec& spec, double k, std::size_t trials,
                   Seed seed) {
  spec.Validate();
  const std::size_t d = spec.dim();
  const Vector mu = DistributionMean(spec);
  const std::vector<Vector> dirs = MomentDirections(d);
  Vector sums(dirs.size(), 0.0);
  Vector draw(d);
  Vector centered(d);
  Rng rng(seed, {kMomentStream});
  for (std::size_t t = 0; t < trials; ++t) {
    SampleOne(spec, rng, draw);
    for (std::size_t c = 0; c < d; ++c) centered[c] = draw[c] - mu[c];
    for (std::size_t v = 0; v < dirs.size(); ++v) {
      sums[v] += std::pow(std::abs(Dot(centered, dirs[v])), k);
    }
  }
  double best = 0.0;
  for (double s : sums) {
    best = std::max(best, std::pow(s / static_cast<double>(trials), 1.0 / k));
  }
  return best;
}

nlohmann::json ToJson(const SyntheticSpec& spec) {
  nlohmann::json extra = nlohmann::json::object();
  if (spec.family == Family::kPointMassMixture) {
    extra["alpha"] = spec.alpha;
    extra["direction"] = spec.direction;
    if (spec.lambda_override) extra["lambda"] = *spec.lambda_override;
  } else if (spec.family == Family::kStudentT) {
    extra["dof"] = spec.dof;
  }
  return {{"family", FamilyName(spec.family)},
          {"mean", spec.mean},
          {"k", spec.k},
          {"extra", extra}};
}

SyntheticSpec SpecFromJson(const nlohmann::json& j) {
  try {
    SyntheticSpec spec;
    spec.family = ParseFamily(j.at("family").get<std::string>());
    spec.mean = j.at("mean").get<Vector>();
    spec.k = j.at("k").get<double>();
    const nlohmann::json extra =
        j.contains("extra") ? j.at("extra") : nlohmann::json::object();
    if (spec.family == Family::kPointMassMixture) {
      spec.alpha = extra.value("alpha", 0.0);
      spec.direction = extra.contains("direction")
                           ? extra.at("direction").get<Vector>()
                           : UnitE1(spec.mean.size());
      if (extra.contains("lambda")) {
        spec.lambda_override = extra.at("lambda").get<double>();
      }
    } else if (spec.family == Family::kStudentT) {
      spec.dof = extra.value("dof", 0.0);
    }
    spec.Validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad distribution spec JSON: ") + e.what());
  }
}

}  // namespace dpmean
