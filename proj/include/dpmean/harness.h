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

#ifndef DPMEAN_HARNESS_H_
#define DPMEAN_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpmean/core.h"
#include "dpmean/est1d.h"
#include "dpmean/esthd_approx.h"
#include "dpmean/esthd_pure.h"
#include "dpmean/random.h"
#include "dpmean/report.h"
#include "dpmean/synthetic.h"
#include "json.hpp"

namespace dpmean {

inline constexpr int kCsvSchemaVersion = 1;

enum class EstimatorKind { kEst1d, kHdSingle, kHdTwoRound, kPureDp };

std::string EstimatorName(EstimatorKind kind);
// Throws ConfigError for unknown names.
EstimatorKind ParseEstimator(const std::string& name);

// Throws ConfigError when the estimator cannot run on the budget: pure_dp
// needs delta = 0, hd_single and hd_two_round need delta > 0.
void CheckEstimatorBudget(EstimatorKind kind, const PrivacyBudget& budget);

struct EstimatorOptions {
  Est1dOptions est1d;
  HdOptions hd;
  PureOptions pure;
};

// Runs one estimator on `data`. Dimension restrictions (est1d is univariate,
// pure_dp needs d <= 4) come from the estimators themselves.
EstimateReport RunEstimator(EstimatorKind kind, const PersonDataset& data,
                            const PrivacyBudget& budget,
                            const ProblemParams& params, Seed seed,
                            const EstimatorOptions& options = {});

struct ParameterGrid {
  std::vector<std::size_t> n{1024};
  std::vector<std::size_t> m{100};
  std::vector<std::size_t> d{1};
  std::vector<double> epsilon{1.0};
  std::vector<double> delta{0.0};
  std::vector<double> alpha{0.1};
  std::vector<double> k{4.0};
};

struct GridPoint {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t d = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double k = 0.0;

  // FNV-1a over the canonical text form; independent of grid order.
  std::uint64_t Hash() const;
};

// Cross product in the order n, m, d, epsilon, delta, alpha, k (k fastest).
std::vector<GridPoint> ExpandGrid(const ParameterGrid& grid);

// The base spec moved to dimension d and moment order k: the mean is
// truncated or zero-padded, and a point-mass direction of the wrong size is
// replaced by e_1.
SyntheticSpec SpecAt(const SyntheticSpec& base, std::size_t d, double k);

struct ExperimentConfig {
  EstimatorKind estimator = EstimatorKind::kEst1d;
  SyntheticSpec spec;
  ParameterGrid grid;
  double beta = 0.1;
  double range_R = 4.0;
  std::size_t trials = 1;
  Seed seed;
  std::string output_path;
  // Draw per-person averages directly instead of all n*m samples. Exact in
  // law for every family; off reproduces SampleDataset bit for bit.
  bool summarize = true;
  EstimatorOptions options;

  // Throws ConfigError (or ParameterError) when invalid.
  void Validate() const;
};

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const ExperimentConfig& config);
ExperimentConfig LoadExperimentConfig(const std::string& path);

struct TrialRow {
  GridPoint point;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string failure;
  Vector estimate;
  double error_l2 = 0.0;
  bool success = false;
  double wall_time_ms = 0.0;
  std::optional<double> rho;
  std::optional<double> rho1;
  std::optional<double> rho2;
  Vector mu_coarse;
  PrivacyBudget consumed;
};

struct GridSummary {
  GridPoint point;
  std::size_t trials = 0;
  std::size_t failures = 0;
  // Failed trials count as infinite error.
  double median_error = 0.0;
  double success_rate = 0.0;
};

// Seed of one trial: Derive(config.seed, {kTrialStream, point.Hash(), trial}).
Seed TrialSeed(Seed base, const GridPoint& point, std::size_t trial);

// One seeded trial. EstimationFailed is recorded in the row, other errors
// propagate.
TrialRow RunTrial(const ExperimentConfig& config, const GridPoint& point,
                  std::size_t trial);

GridSummary Summarize(const GridPoint& point,
                      const std::vector<TrialRow>& rows);

struct ExperimentResult {
  std::vector<TrialRow> rows;          // grid order, then trial
  std::vector<GridSummary> summaries;  // grid order
};

// Runs every (grid point, trial) pair in parallel; no I/O.
ExperimentResult RunExperimentRows(const ExperimentConfig& config);

void WriteExperimentCsv(const ExperimentConfig& config,
                        const ExperimentResult& result, std::ostream& out);

// RunExperimentRows, then writes config.output_path through a temporary
// file and a rename. Throws IoError if the path is not writable.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// Dataset CSV: header person_id,sample_id,x1,...,xd. A person's rows must be
// contiguous and every person needs the same number of samples. Errors are
// InputError with the offending line number.
PersonDataset ParseDatasetCsv(std::istream& in);
PersonDataset ReadDatasetCsv(const std::string& path);
void WriteDatasetCsv(const PersonDataset& data, std::ostream& out);

// Tail benchmark.

struct TailbenchConfig {
  std::vector<Family> families{Family::kScaledGaussian,
                               Family::kPointMassMixture};
  std::vector<std::size_t> m{16, 64, 256};
  std::vector<double> k{3.0, 4.0};
  // Dimensions for the high-dimensional bound.
  std::vector<std::size_t> highd_d{2, 4};
  std::vector<std::string> bounds{"heavytail", "berry_esseen", "highd"};
  std::size_t t_points = 12;
  std::size_t trials = 1000000;
  // Point-mass mixture alpha and Student-t degrees of freedom.
  double point_mass_alpha = 0.02;
  double student_dof = 6.0;
  Seed seed;
  std::string output_path;
  // Constant source: "frozen" (FrozenConstant) or a number.
  std::string constants = "frozen";
};

TailbenchConfig TailbenchConfigFromJson(const nlohmann::json& j);

struct TailRow {
  Family family = Family::kScaledGaussian;
  std::size_t m = 0;
  double k = 0.0;
  std::size_t d = 1;
  double t = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  std::string bound_name;
  // Bound with constant 1; the pass test uses c_cal * bound_value.
  double bound_value = 0.0;
  double c_cal = 1.0;
  bool pass = false;
  bool valid = false;
};

// The t-grid each bound is checked on:
//   heavytail     [sqrt(ln m / m), 1]
//   berry_esseen  [t_min, 3 t_min], t_min = sqrt((k-1) ln m / m)
//   highd         [t_1, 3 t_1],     t_1 = sqrt(d ln m / m)
std::vector<double> TailGrid(const std::string& bound, std::size_t m, double k,
                             std::size_t d, std::size_t points);

// Rows with c_cal = 1 and pass unset; ApplyConstant fills both.
std::vector<TailRow> RunTailbenchRows(const TailbenchConfig& config);
void ApplyConstant(TailRow& row, double c_cal);

// pass iff empirical + 3 std_error <= c_cal * bound_value.
bool TailRowPasses(const TailRow& row, double c_cal);

// Smallest candidate in kCalibrationCandidates under which every row of
// (family, bound) passes; nullopt when none does.
std::map<std::pair<Family, std::string>, std::optional<double>> Calibrate(
    const std::vector<TailRow>& rows);

void WriteTailCsv(const std::vector<TailRow>& rows, std::ostream& out);

// Runs, applies constants, writes config.output_path when non-empty.
std::vector<TailRow> RunTailbench(const TailbenchConfig& config);

struct SelfTestCase {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Closed-form and limiting-case examples; each takes well under a second.
std::vector<SelfTestCase> SelfTest();

// Writes `text` to `path` through a temporary file and a rename.
void WriteFileAtomically(const std::string& path, const std::string& text);

}  // namespace dpmean

#endif  // DPMEAN_HARNESS_H_
