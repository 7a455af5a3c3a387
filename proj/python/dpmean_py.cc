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

// Python bindings. Structured results cross the boundary as JSON text and
// are decoded in dpmean/__init__.py.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include "dpmean/errors.h"
#include "dpmean/harness.h"
#include "dpmean/synthetic.h"
#include "dpmean/tailbounds.h"

namespace py = pybind11;
using json = nlohmann::json;

namespace dpmean {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Accepts samples shaped (n, m, d) or (n, m) for d = 1.
PersonDataset DatasetFromArray(const Array& samples) {
  const py::buffer_info info = samples.request();
  if (info.ndim != 2 && info.ndim != 3) {
    throw InputError("samples must have shape (n, m) or (n, m, d)");
  }
  const auto n = static_cast<std::size_t>(info.shape[0]);
  const auto m = static_cast<std::size_t>(info.shape[1]);
  const std::size_t d =
      info.ndim == 3 ? static_cast<std::size_t>(info.shape[2]) : 1;
  const double* ptr = static_cast<const double*>(info.ptr);
  return PersonDataset(n, m, d, Vector(ptr, ptr + n * m * d));
}

Array ToArray(const PersonDataset& data) {
  Array out({data.n(), data.m(), data.d()});
  double* dst = out.mutable_data();
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto p = data.person(i);
    std::copy(p.begin(), p.end(), dst + i * data.m() * data.d());
  }
  return out;
}

std::string Estimate(const std::string& estimator, const Array& samples,
                     double epsilon, double delta, double k, double alpha,
                     double beta, double range_R, std::uint64_t seed) {
  const PersonDataset data = DatasetFromArray(samples);
  const EstimateReport report = RunEstimator(
      ParseEstimator(estimator), data, PrivacyBudget::Make(epsilon, delta),
      ProblemParams::Make(k, alpha, beta, range_R), Seed{seed});
  return ToJson(report).dump();
}

Array SampleDatasetPy(const std::string& spec_json, std::size_t n,
                      std::size_t m, std::uint64_t seed) {
  return ToArray(SampleDataset(SpecFromJson(json::parse(spec_json)), n, m,
                               Seed{seed}));
}

std::string RunExperimentPy(const std::string& config_json) {
  const ExperimentConfig config =
      ExperimentConfigFromJson(json::parse(config_json));
  config.Validate();
  std::ostringstream out;
  WriteExperimentCsv(config, RunExperimentRows(config), out);
  return out.str();
}

py::dict BoundDict(const BoundValue& b) {
  py::dict d;
  d["value"] = b.value;
  d["polynomial_term"] = b.polynomial_term;
  d["exponential_term"] = b.exponential_term;
  d["dominant"] = b.dominant;
  d["valid"] = b.valid;
  return d;
}

TailBoundQuery MakeQuery(std::size_t m, double k, std::size_t d, double t,
                         double constant) {
  return TailBoundQuery{m, k, d, t, constant};
}

}  // namespace
}  // namespace dpmean

PYBIND11_MODULE(_dpmean, m) {
  using namespace dpmean;
  m.doc() = "Person-level differentially private mean estimation.";

  static py::exception<EstimationFailed> estimation_failed(
      m, "EstimationFailed", PyExc_RuntimeError);

  m.def("estimate", &Estimate, py::arg("estimator"), py::arg("samples"),
        py::arg("epsilon"), py::arg("delta") = 0.0, py::arg("k") = 4.0,
        py::arg("alpha") = 0.1, py::arg("beta") = 0.1, py::arg("R") = 4.0,
        py::arg("seed") = 0);
  m.def("sample_dataset", &SampleDatasetPy, py::arg("spec_json"),
        py::arg("n"), py::arg("m"), py::arg("seed") = 0);
  m.def("run_experiment_csv", &RunExperimentPy, py::arg("config_json"));

  m.def(
      "bound_heavytail",
      [](std::size_t mm, double k, double t, double c) {
        return BoundDict(BoundHeavytail(MakeQuery(mm, k, 1, t, c)));
      },
      py::arg("m"), py::arg("k"), py::arg("t"), py::arg("constant") = 1.0);
  m.def(
      "bound_berry_esseen",
      [](std::size_t mm, double k, double t, double c) {
        return BoundDict(BoundBerryEsseen(MakeQuery(mm, k, 1, t, c)));
      },
      py::arg("m"), py::arg("k"), py::arg("t"), py::arg("constant") = 1.0);
  m.def(
      "bound_highd",
      [](std::size_t mm, double k, std::size_t d, double t, double c) {
        return BoundDict(BoundHighd(MakeQuery(mm, k, d, t, c)));
      },
      py::arg("m"), py::arg("k"), py::arg("d"), py::arg("t"),
      py::arg("constant") = 1.0);
  m.def("bound_markov", &BoundMarkov, py::arg("k"), py::arg("t"));
  m.def("bound_norm_onesample", &BoundNormOneSample, py::arg("d"),
        py::arg("k"), py::arg("t"));

  m.def(
      "mc_tail",
      [](const std::string& spec_json, std::size_t mm,
         const std::vector<double>& t_grid, std::size_t trials,
         std::uint64_t seed, bool one_sided) {
        const auto points =
            McTail(SpecFromJson(json::parse(spec_json)), mm, t_grid, trials,
                   Seed{seed}, one_sided ? TailMode::kOneSided : TailMode::kNorm);
        py::list out;
        for (const TailPoint& p : points) {
          py::dict d;
          d["t"] = p.t;
          d["empirical"] = p.empirical;
          d["std_error"] = p.std_error;
          d["wilson_lo"] = p.wilson_lo;
          d["wilson_hi"] = p.wilson_hi;
          out.append(d);
        }
        return out;
      },
      py::arg("spec_json"), py::arg("m"), py::arg("t_grid"),
      py::arg("trials") = 100000, py::arg("seed") = 0,
      py::arg("one_sided") = false);

  m.def(
      "lemma_checks",
      [](std::uint64_t seed) {
        py::list out;
        for (const LemmaCheck& c : LemmaChecks(Seed{seed}).checks) {
          py::dict d;
          d["name"] = c.name;
          d["detail"] = c.detail;
          d["observed"] = c.observed;
          d["limit"] = c.limit;
          d["pass"] = c.pass;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1);
  m.def("selftest", [] {
    py::list out;
    for (const SelfTestCase& c : SelfTest()) {
      out.append(py::make_tuple(c.name, c.pass));
    }
    return out;
  });
}
