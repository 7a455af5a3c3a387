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

#include "dpmean/report.h"

namespace dpmean {

nlohmann::json ToJson(const EstimateReport& report) {
  nlohmann::json j;
  j["estimator"] = report.estimator;
  j["estimate"] = report.estimate;
  for (const auto& [key, value] : report.scalars) j[key] = value;
  for (const auto& [key, value] : report.vectors) j[key] = value;
  const PrivacyBudget total = report.consumed();
  j["epsilon"] = total.epsilon;
  j["delta"] = total.delta;
  nlohmann::json ledger = nlohmann::json::array();
  for (const auto& e : report.ledger.entries) {
    ledger.push_back({{"label", e.label},
                      {"epsilon", e.epsilon},
                      {"delta", e.delta},
                      {"partition", e.partition}});
  }
  j["ledger"] = ledger;
  j["seed"] = report.seed;
  j["wall_time_ms"] = report.wall_time_ms;
  if (!report.notes.empty()) j["notes"] = report.notes;
  return j;
}

}  // namespace dpmean
