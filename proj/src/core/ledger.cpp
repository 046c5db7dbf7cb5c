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

#include "sublab/core/ledger.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sublab {

bool UsedIndices::contains(std::uint32_t i) const {
  return all || std::find(indices.begin(), indices.end(), i) != indices.end();
}

UsageLedger::UsageLedger(std::size_t n, bool keep_sets)
    : n_(n), keep_sets_(keep_sets), seen_(n, 0) {}

void UsageLedger::mark(std::uint32_t i) {
  if (!seen_[i]) {
    seen_[i] = 1;
    ++covered_;
    first_use_.push_back(i);
  }
}

void UsageLedger::record(std::span<const std::uint32_t> indices) {
  for (auto i : indices) {
    if (i >= n_) {
      throw std::out_of_range("UsageLedger: index " + std::to_string(i) +
                              " outside data range of size " + std::to_string(n_));
    }
  }
  for (auto i : indices) mark(i);
  access_count_ += indices.size();
  step_sizes_.push_back(static_cast<std::uint32_t>(indices.size()));
  cumulative_sizes_.push_back(static_cast<std::uint32_t>(covered_));
  if (keep_sets_) step_sets_.emplace_back(indices.begin(), indices.end());
}

void UsageLedger::record(const UsedIndices& used) {
  if (!used.all) {
    record(std::span<const std::uint32_t>(used.indices));
    return;
  }
  if (covered_ < n_) {
    for (std::uint32_t i = 0; i < n_; ++i) mark(i);
  }
  access_count_ += n_;
  step_sizes_.push_back(static_cast<std::uint32_t>(n_));
  cumulative_sizes_.push_back(static_cast<std::uint32_t>(covered_));
  if (keep_sets_) {
    std::vector<std::uint32_t> all(n_);
    for (std::uint32_t i = 0; i < n_; ++i) all[i] = i;
    step_sets_.push_back(std::move(all));
  }
}

std::optional<std::size_t> first_cover_step(const UsageLedger& ledger,
                                            std::size_t threshold) {
  const auto& sizes = ledger.cumulative_sizes();
  // Cumulative sizes are nondecreasing, so the first hit is a lower bound search.
  auto it = std::lower_bound(sizes.begin(), sizes.end(), threshold,
                             [](std::uint32_t s, std::size_t t) { return s < t; });
  if (it == sizes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - sizes.begin()) + 1;
}

}  // namespace sublab
