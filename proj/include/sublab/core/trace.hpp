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

#ifndef SUBLAB_CORE_TRACE_HPP_
#define SUBLAB_CORE_TRACE_HPP_

#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "sublab/core/ledger.hpp"

namespace sublab {

/// States include the initial point, so states.size() == ledger.steps() + 1.
struct ChainTrace {
  std::vector<Eigen::VectorXd> states;
  std::vector<bool> accepted;
  UsageLedger ledger;

  explicit ChainTrace(std::size_t n, bool keep_sets = false) : ledger(n, keep_sets) {}

  std::size_t steps() const { return ledger.steps(); }
  /// Component j of every recorded state.
  std::vector<double> component(Eigen::Index j) const;
  double acceptance_rate() const;
};

/// Columns: step, theta_1..theta_d, accepted, step_size, cumulative_size.
/// Step 0 is the initial state with accepted=1 and zero usage.
void write_trace_csv(std::ostream& out, const ChainTrace& trace);

}  // namespace sublab

#endif  // SUBLAB_CORE_TRACE_HPP_
