// Copyright 2026 The sublab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sublab/diagnostics/report.hpp"

#include <cmath>
#include <stdexcept>

#include "sublab/diagnostics/scaling.hpp"

namespace sublab::diagnostics {

void DiagnosticsReport::fill_cost() {
  if (n && gap && tau && *gap > 0.0) cost = diagnostics::cost(*n, *gap, *tau);
}

void DiagnosticsReport::validate() const {
  if (gap && !(*gap >= 0.0 && *gap <= 1.0)) throw std::invalid_argument("report: gap outside [0, 1]");
  if (pseudo_gap && !(*pseudo_gap >= 0.0 && *pseudo_gap <= 1.0)) {
    throw std::invalid_argument("report: pseudo gap outside [0, 1]");
  }
  if (cost && n && gap && tau) {
    const double expected = *n / (*gap * *tau);
    if (std::abs(*cost - expected) > 1e-9 * std::abs(expected)) {
      throw std::invalid_argument("report: cost differs from n / (gap * tau)");
    }
  }
}

nlohmann::json DiagnosticsReport::to_json() const {
  validate();
  nlohmann::json j = nlohmann::json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("n", n);
  put("gap", gap);
  put("pseudo_gap", pseudo_gap);
  put("asymptotic_variance", asymptotic_variance);
  put("ess", ess);
  put("tau", tau);
  put("tau_quantile", tau_quantile);
  put("cost", cost);
  if (!tv.empty()) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [name, value] : tv) t[name] = value;
    j["tv"] = t;
  }
  return j;
}

}  // namespace sublab::diagnostics
