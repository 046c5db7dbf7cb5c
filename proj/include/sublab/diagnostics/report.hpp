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

#ifndef SUBLAB_DIAGNOSTICS_REPORT_HPP_
#define SUBLAB_DIAGNOSTICS_REPORT_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace sublab::diagnostics {

struct DiagnosticsReport {
  std::optional<double> n;
  std::optional<double> gap;
  std::optional<double> pseudo_gap;
  std::optional<double> asymptotic_variance;
  std::optional<double> ess;
  std::optional<double> tau;
  std::optional<double> tau_quantile;
  std::optional<double> cost;
  std::vector<std::pair<std::string, double>> tv;

  /// Sets cost = n / (gap * tau) when all three are present.
  void fill_cost();
  /// Throws std::invalid_argument when gap is outside [0, 1] or cost disagrees
  /// with n / (gap * tau).
  void validate() const;
  nlohmann::json to_json() const;
};

}  // namespace sublab::diagnostics

#endif  // SUBLAB_DIAGNOSTICS_REPORT_HPP_
