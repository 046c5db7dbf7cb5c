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

#ifndef SUBLAB_CORE_LEDGER_HPP_
#define SUBLAB_CORE_LEDGER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sublab {

/// Indices (0-based) whose values entered a transition. `all` is a compact
/// encoding of {0, ..., n-1} for kernels that read every datum.
struct UsedIndices {
  bool all = false;
  std::vector<std::uint32_t> indices;

  static UsedIndices everything() { return UsedIndices{true, {}}; }
  std::size_t size(std::size_t n) const { return all ? n : indices.size(); }
  bool contains(std::uint32_t i) const;
};

/// Per-step record of which data a chain has used.
///
/// A datum counts as used at step t iff it appears in that step's selected
/// set S_t. The cumulative union only grows; `access_count` counts with
/// multiplicity. Individual step sets are retained only when `keep_sets` is
/// true, since full-data kernels would otherwise store n indices per step.
class UsageLedger {
 public:
  explicit UsageLedger(std::size_t n, bool keep_sets = false);

  /// Appends S_t. Throws std::out_of_range for an index >= n.
  void record(const UsedIndices& used);
  void record(std::span<const std::uint32_t> indices);

  std::size_t n() const { return n_; }
  std::size_t steps() const { return cumulative_sizes_.size(); }
  std::size_t cumulative_size() const { return covered_; }
  std::uint64_t access_count() const { return access_count_; }
  bool is_covered(std::uint32_t i) const { return seen_[i] != 0; }

  /// |S_t| for t = 1..steps().
  const std::vector<std::uint32_t>& step_sizes() const { return step_sizes_; }
  /// |S_1 u ... u S_t| for t = 1..steps().
  const std::vector<std::uint32_t>& cumulative_sizes() const { return cumulative_sizes_; }
  /// Retained step sets; empty unless constructed with keep_sets.
  const std::vector<std::vector<std::uint32_t>>& step_sets() const { return step_sets_; }
  /// Indices in order of first use.
  const std::vector<std::uint32_t>& first_use_order() const { return first_use_; }

 private:
  void mark(std::uint32_t i);

  std::size_t n_;
  bool keep_sets_;
  std::vector<std::uint8_t> seen_;
  std::size_t covered_ = 0;
  std::uint64_t access_count_ = 0;
  std::vector<std::uint32_t> step_sizes_;
  std::vector<std::uint32_t> cumulative_sizes_;
  std::vector<std::vector<std::uint32_t>> step_sets_;
  std::vector<std::uint32_t> first_use_;
};

/// Smallest 1-based step s with |S_1 u ... u S_s| >= threshold.
std::optional<std::size_t> first_cover_step(const UsageLedger& ledger,
                                            std::size_t threshold);

}  // namespace sublab

#endif  // SUBLAB_CORE_LEDGER_HPP_
