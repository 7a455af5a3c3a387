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

#ifndef DPMEAN_REPORT_H_
#define DPMEAN_REPORT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpmean/core.h"
#include "dpmean/mechanisms.h"
#include "json.hpp"

namespace dpmean {

// Output of every estimator. `scalars` holds internal parameters such as rho,
// rho1, rho2; `vectors` holds centers such as mu_coarse, u1, u2.
struct EstimateReport {
  std::string estimator;
  Vector estimate;
  std::map<std::string, double> scalars;
  std::map<std::string, Vector> vectors;
  BudgetLedger ledger;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
  std::vector<std::string> notes;

  double scalar(const std::string& key) const { return scalars.at(key); }
  PrivacyBudget consumed() const { return LedgerTotal(ledger); }
};

nlohmann::json ToJson(const EstimateReport& report);

}  // namespace dpmean

#endif  // DPMEAN_REPORT_H_
