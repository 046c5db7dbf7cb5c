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

#ifndef SUBLAB_KERNELS_KERNEL_HPP_
#define SUBLAB_KERNELS_KERNEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sublab/core/ledger.hpp"
#include "sublab/core/rng.hpp"
#include "sublab/core/trace.hpp"
#include "sublab/kernels/target.hpp"

namespace sublab::kernels {

/// theta plus the kernel's auxiliary component: brightness bits for firefly,
/// scan position for the permutation wrapper.
struct KernelState {
  Eigen::VectorXd theta;
  std::vector<std::uint8_t> bright;
  std::size_t scan_pos = 0;
};

enum class StepStatus { kOk, kAborted };

struct StepResult {
  KernelState state;
  UsedIndices used;
  bool accepted = false;
  StepStatus status = StepStatus::kOk;
  std::string failure;
};

/// Substream ids for the per-step stream. Each purpose draws from its own
/// child so that, for example, a batch draw never shifts the proposal.
namespace purpose {
inline constexpr std::uint64_t kProposal = 1;
inline constexpr std::uint64_t kAccept = 2;
inline constexpr std::uint64_t kBatch = 3;
inline constexpr std::uint64_t kBrightness = 4;
inline constexpr std::uint64_t kGrowth = 5;
}  // namespace purpose

class Kernel {
 public:
  virtual ~Kernel() = default;

  virtual std::string name() const = 0;
  virtual nlohmann::json config_json() const = 0;
  /// Builds the starting state; kernels with auxiliary variables draw them here.
  virtual KernelState initial_state(const Eigen::VectorXd& theta, const Target& target,
                                    RngStream& stream) const;
  /// One transition. `stream` is private to this step; `used` lists every
  /// datum whose value entered a computation.
  virtual StepResult step(const KernelState& state, const Target& target,
                          RngStream& stream) const = 0;
};

/// Componentwise uniform proposal with half-width scale * n^-1/2.
Eigen::VectorXd uniform_proposal(const Eigen::VectorXd& theta, double half_width,
                                 RngStream& stream);
double scaled_half_width(double scale, std::size_t n);

struct RunOptions {
  std::size_t steps = 1000;
  bool keep_sets = false;
  /// Store every theta in the trace; turn off for long runs and use `observer`.
  bool record_states = true;
  std::function<void(std::size_t step, const KernelState&)> observer;
};

struct ChainRun {
  ChainTrace trace;
  KernelState final_state;
  std::size_t accepted = 0;
};

/// Step t (1-based) uses stream.child(t). Throws std::runtime_error when a
/// step aborts.
ChainRun run_chain(const Kernel& kernel, const Target& target, KernelState initial,
                   const RunOptions& options, const RngStream& stream);

}  // namespace sublab::kernels

#endif  // SUBLAB_KERNELS_KERNEL_HPP_
