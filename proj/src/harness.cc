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

#include "dpmean/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dpmean/clipping.h"
#include "dpmean/errors.h"
#include "dpmean/mechanisms.h"
#include "dpmean/parallel.h"
#include "dpmean/tailbounds.h"

namespace dpmean {
namespace {

using nlohmann::json;

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string JoinVector(const Vector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += Num(v[i]);
  }
  return out;
}

template <typename T>
std::vector<T> ListOf(const json& j, const char* key,
                      const std::vector<T>& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

template <typename T>
void RequireNonEmpty(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw ConfigError(std::string("grid.") + name + " is empty");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

json ParseJson(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

}  // namespace

std::string EstimatorName(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kEst1d:
      return "est1d";
    case EstimatorKind::kHdSingle:
      return "hd_single";
    case EstimatorKind::kHdTwoRound:
      return "hd_two_round";
    case EstimatorKind::kPureDp:
      return "pure_dp";
  }
  return "unknown";
}

EstimatorKind ParseEstimator(const std::string& name) {
  for (EstimatorKind kind :
       {EstimatorKind::kEst1d, EstimatorKind::kHdSingle,
        EstimatorKind::kHdTwoRound, EstimatorKind::kPureDp}) {
    if (EstimatorName(kind) == name) return kind;
  }
  throw ConfigError("unknown estimator '" + name +
                    "' (expected est1d, hd_single, hd_two_round, pure_dp)");
}

void CheckEstimatorBudget(EstimatorKind kind, const PrivacyBudget& budget) {
  if (kind == EstimatorKind::kPureDp && budget.delta != 0.0) {
    throw ConfigError("pure_dp requires delta = 0");
  }
  if ((kind == EstimatorKind::kHdSingle ||
       kind == EstimatorKind::kHdTwoRound) &&
      !(budget.delta > 0.0)) {
    throw ConfigError(EstimatorName(kind) + " requires delta > 0");
  }
}

EstimateReport RunEstimator(EstimatorKind kind, const PersonDataset& data,
                            const PrivacyBudget& budget,
                            const ProblemParams& params, Seed seed,
                            const EstimatorOptions& options) {
  CheckEstimatorBudget(kind, budget);
  switch (kind) {
    case EstimatorKind::kEst1d:
      return EstimateMean1d(data, budget, params, seed, options.est1d);
    case EstimatorKind::kHdSingle:
      return EstimateSingleRound(data, budget, params, seed, options.hd);
    case EstimatorKind::kHdTwoRound:
      return EstimateTwoRound(data, budget, params, seed, options.hd);
    case EstimatorKind::kPureDp:
      return EstimatePureFull(data, params, budget.epsilon, seed,
                              options.pure);
  }
  throw ConfigError("unknown estimator");
}

std::uint64_t GridPoint::Hash() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "n=%zu;m=%zu;d=%zu;eps=%.17g;delta=%.17g;"
                "alpha=%.17g;k=%.17g",
                n, m, d, epsilon, delta, alpha, k);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* c = buf; *c; ++c) {
    h ^= static_cast<unsigned char>(*c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<GridPoint> ExpandGrid(const ParameterGrid& grid) {
  std::vector<GridPoint> points;
  for (std::size_t n : grid.n)
    for (std::size_t m : grid.m)
      for (std::size_t d : grid.d)
        for (double eps : grid.epsilon)
          for (double delta : grid.delta)
            for (double alpha : grid.alpha)
              for (double k : grid.k)
                points.push_back(GridPoint{n, m, d, eps, delta, alpha, k});
  return points;
}

SyntheticSpec SpecAt(const SyntheticSpec& base, std::size_t d, double k) {
  SyntheticSpec spec = base;
  spec.k = k;
  spec.mean.resize(d, 0.0);
  if (spec.family == Family::kPointMassMixture &&
      spec.direction.size() != d) {
    spec.direction.assign(d, 0.0);
    spec.direction[0] = 1.0;
  }
  return spec;
}

void ExperimentConfig::Validate() const {
  RequireNonEmpty(grid.n, "n");
  RequireNonEmpty(grid.m, "m");
  RequireNonEmpty(grid.d, "d");
  RequireNonEmpty(grid.epsilon, "epsilon");
  RequireNonEmpty(grid.delta, "delta");
  RequireNonEmpty(grid.alpha, "alpha");
  RequireNonEmpty(grid.k, "k");
  if (trials == 0) throw ConfigError("trials must be >= 1");
  for (const GridPoint& p : ExpandGrid(grid)) {
    if (p.n == 0 || p.m == 0 || p.d == 0) {
      throw ConfigError("grid n, m, d must be >= 1");
    }
    const PrivacyBudget budget = PrivacyBudget::Make(p.epsilon, p.delta);
    CheckEstimatorBudget(estimator, budget);
    ProblemParams::Make(p.k, p.alpha, beta, range_R);
    if (estimator == EstimatorKind::kEst1d && p.d != 1) {
      throw ConfigError("est1d needs d = 1");
    }
    if (estimator == EstimatorKind::kPureDp && p.d > 4) {
      throw ConfigError("pure_dp supports d <= 4");
    }
    SpecAt(spec, p.d, p.k).Validate();
  }
}

ExperimentConfig ExperimentConfigFromJson(const json& j) {
  ExperimentConfig config;
  try {
    config.estimator = ParseEstimator(j.at("estimator").get<std::string>());
    config.spec = SpecFromJson(j.at("spec"));
    const json grid = j.value("grid", json::object());
    ParameterGrid g;
    g.n = ListOf(grid, "n", g.n);
    g.m = ListOf(grid, "m", g.m);
    g.d = ListOf(grid, "d", std::vector<std::size_t>{config.spec.dim()});
    g.epsilon = ListOf(grid, "epsilon", g.epsilon);
    g.delta = ListOf(grid, "delta", g.delta);
    g.alpha = ListOf(grid, "alpha", g.alpha);
    g.k = ListOf(grid, "k", std::vector<double>{config.spec.k});
    config.grid = g;
    config.beta = j.value("beta", config.beta);
    config.range_R = j.value("R", config.range_R);
    config.trials = j.value("trials", config.trials);
    config.seed = Seed{j.value("seed", std::uint64_t{0})};
    config.output_path = j.value("output_path", std::string());
    config.summarize = j.value("summarize", config.summarize);
    const json opts = j.value("options", json::object());
    EstimatorOptions& o = config.options;
    o.est1d.rho_constant = opts.value("est1d_rho_constant",
                                      o.est1d.rho_constant);
    o.est1d.coarse_share = opts.value("est1d_coarse_share",
                                      o.est1d.coarse_share);
    if (opts.contains("coarse_mode")) {
      o.hd.coarse_mode = ParseCoarseMode(opts.at("coarse_mode"));
    }
    o.hd.tight_sensitivity =
        opts.value("tight_sensitivity", o.hd.tight_sensitivity);
    o.hd.coarse_r_factor = opts.value("coarse_r_factor", o.hd.coarse_r_factor);
    o.hd.single_round_c0 = opts.value("single_round_c0", o.hd.single_round_c0);
    o.hd.rho1_scale = opts.value("rho1_scale", o.hd.rho1_scale);
    o.hd.rho2_scale = opts.value("rho2_scale", o.hd.rho2_scale);
    o.pure.rho_constant = opts.value("pure_rho_constant", o.pure.rho_constant);
    o.pure.cover_refinement =
        opts.value("cover_refinement", o.pure.cover_refinement);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  config.Validate();
  return config;
}

json ToJson(const ExperimentConfig& config) {
  const ParameterGrid& g = config.grid;
  const EstimatorOptions& o = config.options;
  return json{
      {"estimator", EstimatorName(config.estimator)},
      {"spec", ToJson(config.spec)},
      {"grid",
       {{"n", g.n},
        {"m", g.m},
        {"d", g.d},
        {"epsilon", g.epsilon},
        {"delta", g.delta},
        {"alpha", g.alpha},
        {"k", g.k}}},
      {"beta", config.beta},
      {"R", config.range_R},
      {"trials", config.trials},
      {"seed", config.seed.value},
      {"output_path", config.output_path},
      {"summarize", config.summarize},
      {"options",
       {{"est1d_rho_constant", o.est1d.rho_constant},
        {"est1d_coarse_share", o.est1d.coarse_share},
        {"coarse_mode", CoarseModeName(o.hd.coarse_mode)},
        {"tight_sensitivity", o.hd.tight_sensitivity},
        {"coarse_r_factor", o.hd.coarse_r_factor},
        {"single_round_c0", o.hd.single_round_c0},
        {"rho1_scale", o.hd.rho1_scale},
        {"rho2_scale", o.hd.rho2_scale},
        {"pure_rho_constant", o.pure.rho_constant},
        {"cover_refinement", o.pure.cover_refinement}}}};
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  return ExperimentConfigFromJson(ParseJson(ReadFile(path), path));
}

Seed TrialSeed(Seed base, const GridPoint& point, std::size_t trial) {
  return Derive(base, {kTrialStream, point.Hash(), trial});
}

TrialRow RunTrial(const ExperimentConfig& config, const GridPoint& point,
                  std::size_t trial) {
  const auto start = std::chrono::steady_clock::now();
  TrialRow row;
  row.point = point;
  row.trial = trial;
  const Seed seed = TrialSeed(config.seed, point, trial);
  row.seed = seed.value;
  const SyntheticSpec spec = SpecAt(config.spec, point.d, point.k);
  const Seed data_seed = Derive(seed, {kDatasetStream});
  const PersonDataset data =
      config.summarize ? SamplePersonMeans(spec, point.n, point.m, data_seed)
                       : SampleDataset(spec, point.n, point.m, data_seed);
  const PrivacyBudget budget = PrivacyBudget::Make(point.epsilon, point.delta);
  const ProblemParams params =
      ProblemParams::Make(point.k, point.alpha, config.beta, config.range_R);
  const Vector mu = DistributionMean(spec);
  try {
    const EstimateReport report =
        RunEstimator(config.estimator, data, budget, params,
                     Derive(seed, {kTrialStream}), config.options);
    row.estimate = report.estimate;
    row.error_l2 = Distance2(report.estimate, mu);
    row.success = row.error_l2 <= point.alpha;
    for (const char* key : {"rho", "rho1", "rho2"}) {
      auto it = report.scalars.find(key);
      if (it == report.scalars.end()) continue;
      std::optional<double>& slot =
          key[3] == '\0' ? row.rho : (key[3] == '1' ? row.rho1 : row.rho2);
      slot = it->second;
    }
    if (auto it = report.vectors.find("mu_coarse");
        it != report.vectors.end()) {
      row.mu_coarse = it->second;
    }
    row.consumed = report.consumed();
  } catch (const EstimationFailed& e) {
    row.ok = false;
    row.failure = e.what();
    row.error_l2 = std::numeric_limits<double>::infinity();
    row.success = false;
  }
  row.wall_time_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return row;
}

GridSummary Summarize(const GridPoint& point,
                      const std::vector<TrialRow>& rows) {
  GridSummary s;
  s.point = point;
  std::vector<double> errors;
  std::size_t successes = 0;
  for (const TrialRow& r : rows) {
    ++s.trials;
    if (!r.ok) ++s.failures;
    if (r.success) ++successes;
    errors.push_back(r.error_l2);
  }
  if (errors.empty()) return s;
  std::sort(errors.begin(), errors.end());
  const std::size_t mid = errors.size() / 2;
  s.median_error = errors.size() % 2 ? errors[mid]
                                     : 0.5 * (errors[mid - 1] + errors[mid]);
  s.success_rate =
      static_cast<double>(successes) / static_cast<double>(s.trials);
  return s;
}

ExperimentResult RunExperimentRows(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<GridPoint> points = ExpandGrid(config.grid);
  const std::size_t trials = config.trials;
  ExperimentResult result;
  result.rows.resize(points.size() * trials);
  ParallelFor(result.rows.size(), [&](std::size_t i) {
    result.rows[i] = RunTrial(config, points[i / trials], i % trials);
  });
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto first = result.rows.begin() + static_cast<std::ptrdiff_t>(p * trials);
    result.summaries.push_back(
        Summarize(points[p], std::vector<TrialRow>(first, first + trials)));
  }
  return result;
}

void WriteExperimentCsv(const ExperimentConfig& config,
                        const ExperimentResult& result, std::ostream& out) {
  out << "schema_version,row_type,estimator,family,n,m,d,k,epsilon,delta,"
         "alpha,beta,trial,seed,status,estimate,error_l2,success,rho,rho1,"
         "rho2,mu_coarse,median_error,success_rate,failures,wall_time_ms\n";
  const std::string estimator = EstimatorName(config.estimator);
  const std::string family = FamilyName(config.spec.family);
  auto prefix = [&](const char* type, const GridPoint& p) {
    out << kCsvSchemaVersion << ',' << type << ',' << estimator << ','
        << family << ',' << p.n << ',' << p.m << ',' << p.d << ','
        << Num(p.k) << ',' << Num(p.epsilon) << ',' << Num(p.delta) << ','
        << Num(p.alpha) << ',' << Num(config.beta) << ',';
  };
  auto opt = [](const std::optional<double>& v) {
    return v ? Num(*v) : std::string();
  };
  const std::size_t trials = config.trials;
  for (std::size_t p = 0; p < result.summaries.size(); ++p) {
    for (std::size_t t = 0; t < trials; ++t) {
      const TrialRow& r = result.rows[p * trials + t];
      prefix("trial", r.point);
      out << r.trial << ',' << r.seed << ',' << (r.ok ? "ok" : "failed")
          << ',' << JoinVector(r.estimate) << ',' << Num(r.error_l2) << ','
          << (r.success ? 1 : 0) << ',' << opt(r.rho) << ',' << opt(r.rho1)
          << ',' << opt(r.rho2) << ',' << JoinVector(r.mu_coarse) << ",,,,"
          << Num(r.wall_time_ms) << '\n';
    }
    const GridSummary& s = result.summaries[p];
    prefix("summary", s.point);
    out << ",,,,,,,,,," << Num(s.median_error) << ',' << Num(s.success_rate)
        << ',' << s.failures << ",\n";
  }
}

void WriteFileAtomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path);
  }
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  if (config.output_path.empty()) throw ConfigError("output_path is empty");
  ExperimentResult result = RunExperimentRows(config);
  std::ostringstream csv;
  WriteExperimentCsv(config, result, csv);
  WriteFileAtomically(config.output_path, csv.str());
  return result;
}

// Dataset CSV.

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void LineError(std::size_t line, const std::string& what) {
  throw InputError("dataset line " + std::to_string(line) + ": " + what);
}

long long ParseId(const std::string& text, std::size_t line,
                  const char* column) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    LineError(line, std::string(column) + " '" + text + "' is not an integer");
  }
  if (used != text.size() || v < 0) {
    LineError(line, std::string(column) + " '" + text +
                        "' is not a nonnegative integer");
  }
  return v;
}

double ParseReal(const std::string& text, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    LineError(line, "value '" + text + "' is not a number");
  }
  if (used != text.size() || !std::isfinite(v)) {
    LineError(line, "value '" + text + "' is not a finite number");
  }
  return v;
}

}  // namespace

PersonDataset ParseDatasetCsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) LineError(1, "missing header");
  const std::vector<std::string> header = SplitCsvLine(Trim(line));
  if (header.size() < 3 || Trim(header[0]) != "person_id" ||
      Trim(header[1]) != "sample_id") {
    LineError(1, "header must be person_id,sample_id,x1,...,xd");
  }
  const std::size_t d = header.size() - 2;
  for (std::size_t c = 0; c < d; ++c) {
    if (Trim(header[c + 2]) != "x" + std::to_string(c + 1)) {
      LineError(1, "column " + std::to_string(c + 3) + " must be x" +
                       std::to_string(c + 1));
    }
  }
  Vector values;
  std::vector<long long> seen_people;
  std::size_t m = 0;
  std::size_t current_count = 0;
  long long current = -1;
  std::size_t current_line = 0;
  auto close_person = [&](std::size_t at_line) {
    if (current < 0) return;
    if (m == 0) {
      m = current_count;
    } else if (current_count != m) {
      LineError(at_line, "person " + std::to_string(current) + " has " +
                             std::to_string(current_count) +
                             " samples, expected " + std::to_string(m));
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const std::vector<std::string> fields = SplitCsvLine(trimmed);
    if (fields.size() != d + 2) {
      LineError(line_no, "expected " + std::to_string(d + 2) +
                             " columns, found " +
                             std::to_string(fields.size()));
    }
    const long long person = ParseId(Trim(fields[0]), line_no, "person_id");
    ParseId(Trim(fields[1]), line_no, "sample_id");
    if (person != current) {
      close_person(current_line);
      if (std::find(seen_people.begin(), seen_people.end(), person) !=
          seen_people.end()) {
        LineError(line_no, "rows of person " + std::to_string(person) +
                               " are not contiguous");
      }
      seen_people.push_back(person);
      current = person;
      current_count = 0;
    }
    for (std::size_t c = 0; c < d; ++c) {
      values.push_back(ParseReal(Trim(fields[c + 2]), line_no));
    }
    ++current_count;
    current_line = line_no;
  }
  if (seen_people.empty()) LineError(line_no, "no data rows");
  close_person(current_line);
  return PersonDataset(seen_people.size(), m, d, std::move(values));
}

PersonDataset ReadDatasetCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read dataset " + path);
  return ParseDatasetCsv(in);
}

void WriteDatasetCsv(const PersonDataset& data, std::ostream& out) {
  out << "person_id,sample_id";
  for (std::size_t c = 0; c < data.d(); ++c) out << ",x" << c + 1;
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.m(); ++j) {
      out << i << ',' << j;
      for (std::size_t c = 0; c < data.d(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", data.at(i, j, c));
        out << ',' << buf;
      }
      out << '\n';
    }
  }
}

// Tail benchmark.

TailbenchConfig TailbenchConfigFromJson(const json& j) {
  TailbenchConfig c;
  try {
    if (j.contains("families")) {
      c.families.clear();
      for (const auto& f : j.at("families")) {
        c.families.push_back(ParseFamily(f.get<std::string>()));
      }
    }
    c.m = ListOf(j, "m", c.m);
    c.k = ListOf(j, "k", c.k);
    c.highd_d = ListOf(j, "highd_d", c.highd_d);
    c.bounds = ListOf(j, "bounds", c.bounds);
    c.t_points = j.value("t_points", c.t_points);
    c.trials = j.value("trials", c.trials);
    c.point_mass_alpha = j.value("point_mass_alpha", c.point_mass_alpha);
    c.student_dof = j.value("student_dof", c.student_dof);
    c.seed = Seed{j.value("seed", std::uint64_t{0})};
    c.output_path = j.value("output_path", std::string());
    if (j.contains("constants")) {
      const json& v = j.at("constants");
      c.constants = v.is_number() ? Num(v.get<double>()) : v.get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("tailbench config: ") + e.what());
  }
  for (const std::string& b : c.bounds) {
    if (b != "heavytail" && b != "berry_esseen" && b != "highd") {
      throw ConfigError("unknown bound '" + b + "'");
    }
  }
  if (c.t_points == 0) throw ConfigError("t_points must be >= 1");
  return c;
}

std::vector<double> TailGrid(const std::string& bound, std::size_t m, double k,
                             std::size_t d, std::size_t points) {
  const double md = static_cast<double>(m);
  if (bound == "heavytail") {
    return LinearGrid(std::sqrt(std::log(md) / md), 1.0, points);
  }
  if (bound == "berry_esseen") {
    const double lo = BerryEsseenThreshold(m, k);
    return LinearGrid(lo, 3.0 * lo, points);
  }
  if (bound == "highd") {
    const double lo = HighdThreshold(m, d);
    return LinearGrid(lo, 3.0 * lo, points);
  }
  throw ConfigError("unknown bound '" + bound + "'");
}

namespace {

SyntheticSpec TailSpec(const TailbenchConfig& config, Family family,
                       std::size_t d, double k) {
  const Vector zero(d, 0.0);
  switch (family) {
    case Family::kScaledGaussian:
      return SyntheticSpec::ScaledGaussian(zero, k);
    case Family::kPointMassMixture:
      return SyntheticSpec::PointMassMixture(zero, k,
                                             config.point_mass_alpha);
    case Family::kStudentT:
      return SyntheticSpec::StudentT(zero, k, config.student_dof);
  }
  throw ConfigError("unknown family");
}

double ConstantFor(const TailbenchConfig& config, const TailRow& row) {
  if (config.constants == "frozen") {
    return FrozenConstant(row.family, row.bound_name);
  }
  try {
    std::size_t used = 0;
    const double c = std::stod(config.constants, &used);
    if (used == config.constants.size() && c >= 0.0) return c;
  } catch (const std::exception&) {
  }
  throw ConfigError("constants must be 'frozen' or a number >= 0");
}

}  // namespace

bool TailRowPasses(const TailRow& row, double c_cal) {
  return row.empirical + 3.0 * row.std_error <= c_cal * row.bound_value;
}

void ApplyConstant(TailRow& row, double c_cal) {
  row.c_cal = c_cal;
  row.pass = TailRowPasses(row, c_cal);
}

std::vector<TailRow> RunTailbenchRows(const TailbenchConfig& config) {
  std::vector<TailRow> rows;
  std::size_t run = 0;
  for (Family family : config.families) {
    for (double k : config.k) {
      for (std::size_t m : config.m) {
        for (const std::string& bound : config.bounds) {
          const bool highd = bound == "highd";
          const std::vector<std::size_t> dims =
              highd ? config.highd_d : std::vector<std::size_t>{1};
          for (std::size_t d : dims) {
            const SyntheticSpec spec = TailSpec(config, family, d, k);
            const std::vector<double> grid =
                TailGrid(bound, m, k, d, config.t_points);
            const auto points = McTail(
                spec, m, grid, config.trials, Derive(config.seed, {run++}),
                highd ? TailMode::kNorm : TailMode::kOneSided);
            for (const TailPoint& pt : points) {
              TailRow row;
              row.family = family;
              row.m = m;
              row.k = k;
              row.d = d;
              row.t = pt.t;
              row.empirical = pt.empirical;
              row.std_error = pt.std_error;
              row.bound_name = bound;
              const TailBoundQuery q{m, k, d, pt.t, 1.0};
              const BoundValue value = bound == "heavytail"
                                           ? BoundHeavytail(q)
                                           : bound == "berry_esseen"
                                                 ? BoundBerryEsseen(q)
                                                 : BoundHighd(q);
              row.bound_value = value.value;
              row.valid = value.valid;
              rows.push_back(row);
            }
          }
        }
      }
    }
  }
  return rows;
}

std::map<std::pair<Family, std::string>, std::optional<double>> Calibrate(
    const std::vector<TailRow>& rows) {
  std::map<std::pair<Family, std::string>, std::optional<double>> out;
  for (const TailRow& row : rows) out[{row.family, row.bound_name}];
  for (auto& [key, constant] : out) {
    for (double c : kCalibrationCandidates) {
      const bool all = std::all_of(rows.begin(), rows.end(),
                                   [&](const TailRow& r) {
                                     return r.family != key.first ||
                                            r.bound_name != key.second ||
                                            TailRowPasses(r, c);
                                   });
      if (all) {
        constant = c;
        break;
      }
    }
  }
  return out;
}

void WriteTailCsv(const std::vector<TailRow>& rows, std::ostream& out) {
  out << "schema_version,family,m,k,d,t,empirical,stderr,bound_name,"
         "bound_value,C_cal,pass,valid\n";
  for (const TailRow& r : rows) {
    out << kCsvSchemaVersion << ',' << FamilyName(r.family) << ',' << r.m
        << ',' << Num(r.k) << ',' << r.d << ',' << Num(r.t) << ','
        << Num(r.empirical) << ',' << Num(r.std_error) << ',' << r.bound_name
        << ',' << Num(r.bound_value) << ',' << Num(r.c_cal) << ','
        << (r.pass ? 1 : 0) << ',' << (r.valid ? 1 : 0) << '\n';
  }
}

std::vector<TailRow> RunTailbench(const TailbenchConfig& config) {
  std::vector<TailRow> rows = RunTailbenchRows(config);
  for (TailRow& row : rows) ApplyConstant(row, ConstantFor(config, row));
  if (!config.output_path.empty()) {
    std::ostringstream csv;
    WriteTailCsv(rows, csv);
    WriteFileAtomically(config.output_path, csv.str());
  }
  return rows;
}

// Self test.

std::vector<SelfTestCase> SelfTest() {
  std::vector<SelfTestCase> cases;
  auto add = [&](const std::string& name, bool pass,
                 const std::string& detail = "") {
    cases.push_back({name, pass, detail});
  };
  auto near = [](double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol;
  };
  auto throws = [](auto&& fn) {
    try {
      fn();
    } catch (const ValidationError&) {
      return true;
    }
    return false;
  };

  add("trunc_identity", Trunc1d(0.5, -1, 1) == 0.5);
  add("trunc_upper", Trunc1d(2, -1, 1) == 1);
  add("trunc_lower", Trunc1d(-5, 0, 2) == 0);
  add("trunc_bad_interval", throws([] { Trunc1d(0, 1, -1); }));
  {
    const Vector c = ClipToBall(Vector{3, 4}, ClipBall{{0, 0}, 1});
    add("clip_three_four", near(c[0], 0.6) && near(c[1], 0.8));
    const Vector in = ClipToBall(Vector{0.1, 0.2}, ClipBall{{0, 0}, 1});
    add("clip_inside", in == Vector{0.1, 0.2});
    const Vector z = ClipToBall(Vector{7, -3}, ClipBall{{1, 1}, 0});
    add("clip_zero_radius", z == Vector{1, 1});
  }
  add("markov_t1", BoundMarkov(3, 1) == 1.0);
  add("norm_chebyshev", near(BoundNormOneSample(1, 2, 2), 0.25));
  add("berry_esseen_c0",
      BoundBerryEsseen(TailBoundQuery{100, 3, 1, 0.5, 0.0}).value == 0.0);
  {
    const TailBoundQuery q{1, 3, 1, 2.0, 1.0};
    add("heavytail_m1_markov",
        near(BoundHeavytail(q).polynomial_term, std::pow(2.0, -3.0)));
  }
  add("highd_d1_matches_poly", [] {
    const TailBoundQuery q{100, 4, 1, 0.5, 1.0};
    return std::abs(BoundHighd(q).polynomial_term -
                    BoundBerryEsseen(q).value) <= 1e-15;
  }());
  add("gaussian_zero_sensitivity",
      GaussianStddev(0.0, PrivacyBudget{1.0, 0.01}) == 0.0);
  add("gaussian_needs_delta",
      throws([] { GaussianStddev(1.0, PrivacyBudget{1.0, 0.0}); }));
  add("laplace_bad_scale", throws([] { LaplaceNoise(0.0, Seed{1}); }));
  {
    const PrivacyBudget total = LedgerTotal(BudgetLedger{});
    add("empty_ledger", total.epsilon == 0.0 && total.delta == 0.0);
    BudgetLedger ledger;
    ledger.Add("a", 0.25, 1e-7);
    ledger.Add("b", 0.75, 2e-7);
    const PrivacyBudget sum = LedgerTotal(ledger);
    add("basic_composition_sum",
        near(sum.epsilon, 1.0) && near(sum.delta, 3e-7, 1e-20));
  }
  {
    const std::vector<double> scores{1.0, 5.0, 3.0};
    add("exp_mech_infinite_eps_argmax",
        ExponentialMechanism(scores, 1.0,
                             std::numeric_limits<double>::infinity(),
                             Seed{3}) == 1);
  }
  {
    const std::vector<double> tiny(20, 1e-9);
    const BucketPartition part = BucketDiagnostic(tiny, 0.5);
    add("bucket_vacuous", part.s2 == 0 && part.claim_holds);
  }
  add("binomial_4_2", ExactBinomial(4, 2) == 6);
  {
    const SyntheticSpec pm = SyntheticSpec::PointMassMixture({0.0}, 3, 0.02);
    add("point_mass_lambda", near(PointMassLambda(pm), 0.0707106781, 1e-9));
    add("point_mass_lambda_over_one", throws([] {
          SyntheticSpec::PointMassMixture({0.0}, 3, 0.2).Validate();
        }));
  }
  add("bad_epsilon", throws([] { PrivacyBudget::Make(0.0, 0.0); }));
  add("bad_delta", throws([] { PrivacyBudget::Make(1.0, 1.0); }));
  add("pure_needs_delta_zero", throws([] {
        CheckEstimatorBudget(EstimatorKind::kPureDp, PrivacyBudget{1, 1e-6});
      }));
  add("hd_needs_delta", throws([] {
        CheckEstimatorBudget(EstimatorKind::kHdTwoRound, PrivacyBudget{1, 0});
      }));
  {
    std::istringstream csv("person_id,sample_id,x1\n0,0,1.5\n0,1,2.5\n");
    const PersonDataset data = ParseDatasetCsv(csv);
    add("dataset_csv_roundtrip",
        data.n() == 1 && data.m() == 2 && near(data.GrandMean()[0], 2.0));
    std::istringstream bad("person_id,sample_id,x1\n0,0\n");
    add("dataset_csv_missing_column",
        throws([&] { ParseDatasetCsv(bad); }));
  }
  {
    GridPoint p{100, 10, 1, 1.0, 0.0, 0.1, 4.0};
    GridPoint q = p;
    add("grid_hash_stable", p.Hash() == q.Hash());
    q.n = 101;
    add("grid_hash_distinct", p.Hash() != q.Hash());
  }
  return cases;
}

}  // namespace dpmean
