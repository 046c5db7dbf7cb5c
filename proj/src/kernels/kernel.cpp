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

#include "sublab/kernels/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace sublab::kernels {

KernelState Kernel::initial_state(const Eigen::VectorXd& theta, const Target& target,
                                  RngStream&) const {
  if (theta.size() != target.dim()) throw std::invalid_argument("initial state: dimension mismatch");
  KernelState s;
  s.theta = theta;
  return s;
}

double scaled_half_width(double scale, std::size_t n) {
  return scale / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)));
}

Eigen::VectorXd uniform_proposal(const Eigen::VectorXd& theta, double half_width,
                                 RngStream& stream) {
  Eigen::VectorXd out(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    out[j] = theta[j] + half_width * (2.0 * stream.uniform() - 1.0);
  }
  return out;
}

ChainRun run_chain(const Kernel& kernel, const Target& target, KernelState initial,
                   const RunOptions& options, const RngStream& stream) {
  ChainRun run{ChainTrace(target.n(), options.keep_sets), std::move(initial), 0};
  if (options.record_states) {
    run.trace.states.reserve(options.steps + 1);
    run.trace.states.push_back(run.final_state.theta);
  }
  run.trace.accepted.reserve(options.steps);
  if (options.observer) options.observer(0, run.final_state);
  for (std::size_t t = 1; t <= options.steps; ++t) {
    RngStream step_stream = stream.child(t);
    StepResult r = kernel.step(run.final_state, target, step_stream);
    if (r.status == StepStatus::kAborted) {
      throw std::runtime_error(kernel.name() + ": step " + std::to_string(t) +
                               " aborted: " + r.failure);
    }
    run.trace.ledger.record(r.used);
    run.trace.accepted.push_back(r.accepted);
    run.accepted += r.accepted ? 1 : 0;
    run.final_state = std::move(r.state);
    if (options.record_states) run.trace.states.push_back(run.final_state.theta);
    if (options.observer) options.observer(t, run.final_state);
  }
  return run;
}

}  // namespace sublab::kernels
