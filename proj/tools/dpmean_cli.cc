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

// Command-line front end: estimate, sweep, tailbench, lemma-checks,
// selftest, generate.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dpmean/errors.h"
#include "dpmean/harness.h"
#include "dpmean/parallel.h"
#include "dpmean/tailbounds.h"
#include "json.hpp"

namespace {

using nlohmann::json;

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dpmean::IoError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw dpmean::ConfigError(path + ": " + e.what());
  }
}

void Emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    dpmean::WriteFileAtomically(out_path, text + "\n");
  }
}

struct EstimateArgs {
  std::string data;
  std::string config;
  std::optional<std::string> estimator;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> k;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> range_R;
  std::optional<std::string> coarse_mode;
  bool tight = false;
};

int RunEstimate(const EstimateArgs& args, std::optional<std::uint64_t> seed,
                const std::string& out) {
  json cfg = args.config.empty() ? json::object() : ReadJsonFile(args.config);
  try {
    if (args.estimator) cfg["estimator"] = *args.estimator;
    if (args.epsilon) cfg["epsilon"] = *args.epsilon;
    if (args.delta) cfg["delta"] = *args.delta;
    if (args.k) cfg["k"] = *args.k;
    if (args.alpha) cfg["alpha"] = *args.alpha;
    if (args.beta) cfg["beta"] = *args.beta;
    if (args.range_R) cfg["R"] = *args.range_R;
    if (seed) cfg["seed"] = *seed;
    if (!cfg.contains("estimator")) {
      throw dpmean::ConfigError("estimate needs --estimator or a config");
    }
    const dpmean::EstimatorKind kind =
        dpmean::ParseEstimator(cfg.at("estimator").get<std::string>());
    const dpmean::PrivacyBudget budget = dpmean::PrivacyBudget::Make(
        cfg.value("epsilon", 1.0), cfg.value("delta", 0.0));
    const dpmean::ProblemParams params = dpmean::ProblemParams::Make(
        cfg.value("k", 4.0), cfg.value("alpha", 0.1), cfg.value("beta", 0.1),
        cfg.value("R", 4.0));
    dpmean::EstimatorOptions options;
    if (args.coarse_mode) {
      options.hd.coarse_mode = dpmean::ParseCoarseMode(*args.coarse_mode);
    }
    options.hd.tight_sensitivity = args.tight;
    const dpmean::PersonDataset data = dpmean::ReadDatasetCsv(args.data);
    const dpmean::EstimateReport report = dpmean::RunEstimator(
        kind, data, budget, params,
        dpmean::Seed{cfg.value("seed", std::uint64_t{0})}, options);
    Emit(dpmean::ToJson(report).dump(2), out);
  } catch (const json::exception& e) {
    throw dpmean::ConfigError(std::string("estimate config: ") + e.what());
  }
  return 0;
}

int RunSweep(const std::string& config_path,
             std::optional<std::uint64_t> seed, const std::string& out) {
  json cfg = ReadJsonFile(config_path);
  if (seed) cfg["seed"] = *seed;
  if (!out.empty()) cfg["output_path"] = out;
  const dpmean::ExperimentConfig config =
      dpmean::ExperimentConfigFromJson(cfg);
  const dpmean::ExperimentResult result = dpmean::RunExperiment(config);
  for (const dpmean::GridSummary& s : result.summaries) {
    std::cerr << "n=" << s.point.n << " m=" << s.point.m << " d=" << s.point.d
              << " eps=" << s.point.epsilon << " alpha=" << s.point.alpha
              << " median_error=" << s.median_error
              << " success=" << s.success_rate << '\n';
  }
  return 0;
}

int RunTailbenchCommand(const std::string& config_path,
                        std::optional<std::uint64_t> seed,
                        const std::string& out,
                        std::optional<std::size_t> trials, bool calibrate) {
  json cfg = config_path.empty() ? json::object() : ReadJsonFile(config_path);
  if (seed) cfg["seed"] = *seed;
  if (trials) cfg["trials"] = *trials;
  if (!out.empty()) cfg["output_path"] = out;
  dpmean::TailbenchConfig config = dpmean::TailbenchConfigFromJson(cfg);
  if (calibrate) {
    const auto rows = dpmean::RunTailbenchRows(config);
    json table = json::array();
    for (const auto& [key, constant] : dpmean::Calibrate(rows)) {
      table.push_back({{"family", dpmean::FamilyName(key.first)},
                       {"bound", key.second},
                       {"C_cal", constant ? json(*constant) : json(nullptr)}});
    }
    std::cout << table.dump(2) << '\n';
    return 0;
  }
  const auto rows = dpmean::RunTailbench(config);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.pass ? 0 : 1;
  if (config.output_path.empty()) dpmean::WriteTailCsv(rows, std::cout);
  std::cerr << rows.size() - failed << "/" << rows.size()
            << " grid points dominated\n";
  return failed == 0 ? 0 : 1;
}

int RunLemmaChecks(std::optional<std::uint64_t> seed, const std::string& out) {
  const dpmean::LemmaReport report =
      dpmean::LemmaChecks(dpmean::Seed{seed.value_or(1)});
  json j = json::array();
  for (const auto& c : report.checks) {
    j.push_back({{"name", c.name},
                 {"detail", c.detail},
                 {"observed", c.observed},
                 {"limit", c.limit},
                 {"pass", c.pass}});
  }
  Emit(j.dump(2), out);
  return report.all_pass() ? 0 : 1;
}

int RunSelfTest() {
  int failed = 0;
  for (const auto& c : dpmean::SelfTest()) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << '\n';
    failed += c.pass ? 0 : 1;
  }
  std::cout << (failed ? "selftest failed\n" : "selftest ok\n");
  return failed ? 1 : 0;
}

int RunGenerate(const std::string& spec_path, std::size_t n, std::size_t m,
                std::optional<std::uint64_t> seed, const std::string& out) {
  const dpmean::SyntheticSpec spec = dpmean::SpecFromJson(ReadJsonFile(spec_path));
  const dpmean::PersonDataset data =
      dpmean::SampleDataset(spec, n, m, dpmean::Seed{seed.value_or(0)});
  std::ostringstream csv;
  dpmean::WriteDatasetCsv(data, csv);
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    dpmean::WriteFileAtomically(out, csv.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Person-level differentially private mean estimation"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--out", out, "output path");
    cmd->add_option("--threads", threads, "worker threads (0 = default)");
  };

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand("estimate", "run one estimator");
  estimate->add_option("--data", est.data, "dataset CSV")->required();
  estimate->add_option("--config", est.config, "JSON with estimator settings");
  estimate->add_option("--estimator", est.estimator,
                       "est1d | hd_single | hd_two_round | pure_dp");
  estimate->add_option("--epsilon", est.epsilon);
  estimate->add_option("--delta", est.delta);
  estimate->add_option("--k", est.k, "moment order");
  estimate->add_option("--alpha", est.alpha, "target accuracy");
  estimate->add_option("--beta", est.beta, "failure probability");
  estimate->add_option("--R", est.range_R, "a priori range");
  estimate->add_option("--coarse-mode", est.coarse_mode,
                       "basic | advanced | auto");
  estimate->add_flag("--tight", est.tight,
                     "2 rho sensitivity for clip-and-noise");
  add_common(estimate);

  std::string sweep_config;
  CLI::App* sweep = app.add_subcommand("sweep", "run an experiment grid");
  sweep->add_option("--config", sweep_config, "experiment JSON")->required();
  add_common(sweep);

  std::string tail_config;
  std::optional<std::size_t> tail_trials;
  bool calibrate = false;
  CLI::App* tail = app.add_subcommand("tailbench", "tail-bound domination");
  tail->add_option("--config", tail_config, "tailbench JSON");
  tail->add_option("--trials", tail_trials, "Monte Carlo trials per point");
  tail->add_flag("--calibrate", calibrate,
                 "print the smallest passing constant per family and bound");
  add_common(tail);

  CLI::App* lemmas = app.add_subcommand("lemma-checks", "lemma suite");
  add_common(lemmas);

  CLI::App* selftest = app.add_subcommand("selftest", "closed-form examples");
  add_common(selftest);

  std::string gen_spec;
  std::size_t gen_n = 0;
  std::size_t gen_m = 0;
  CLI::App* generate =
      app.add_subcommand("generate", "write a synthetic dataset CSV");
  generate->add_option("--spec", gen_spec, "SyntheticSpec JSON")->required();
  generate->add_option("--n", gen_n, "people")->required();
  generate->add_option("--m", gen_m, "samples per person")->required();
  add_common(generate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (threads > 0) dpmean::SetThreadCount(threads);
    if (*estimate) return RunEstimate(est, seed, out);
    if (*sweep) return RunSweep(sweep_config, seed, out);
    if (*tail) {
      return RunTailbenchCommand(tail_config, seed, out, tail_trials,
                                 calibrate);
    }
    if (*lemmas) return RunLemmaChecks(seed, out);
    if (*selftest) return RunSelfTest();
    if (*generate) return RunGenerate(gen_spec, gen_n, gen_m, seed, out);
  } catch (const dpmean::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const dpmean::RuntimeFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << app.help();
  return 2;
}
