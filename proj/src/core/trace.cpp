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

#include "sublab/core/trace.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sublab {

std::vector<double> ChainTrace::component(Eigen::Index j) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s[j]);
  return out;
}

double ChainTrace::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  std::size_t a = 0;
  for (bool b : accepted) a += b ? 1 : 0;
  return static_cast<double>(a) / static_cast<double>(accepted.size());
}

void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
  const Eigen::Index d = trace.states.empty() ? 0 : trace.states.front().size();
  out << "step";
  for (Eigen::Index j = 0; j < d; ++j) out << ",theta_" << (j + 1);
  out << ",accepted,step_size,cumulative_size\n";
  const auto& sizes = trace.ledger.step_sizes();
  const auto& cum = trace.ledger.cumulative_sizes();
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    out << t;
    for (Eigen::Index j = 0; j < d; ++j) fmt::print(out, ",{:.17g}", trace.states[t][j]);
    if (t == 0) {
      out << ",1,0,0\n";
    } else {
      out << ',' << (trace.accepted[t - 1] ? 1 : 0) << ',' << sizes[t - 1] << ','
          << cum[t - 1] << '\n';
    }
  }
}

}  // namespace sublab
