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

#ifndef SUBLAB_KERNELS_WEIGHTED_SUBSET_HPP_
#define SUBLAB_KERNELS_WEIGHTED_SUBSET_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sublab/core/rng.hpp"

namespace sublab::kernels {

/// Draws a k-subset S of {0..n-1} with P[S] proportional to prod_{i in S} w_i.
/// k = 1 uses a cumulative table, constant weights a partial shuffle, and
/// the general case an exact sequential scheme over log elementary
/// symmetric polynomials.
class WeightedSubsetSampler {
 public:
  WeightedSubsetSampler(std::vector<double> weights, std::size_t k);

  std::size_t n() const { return weights_.size(); }
  std::size_t k() const { return k_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Indices in increasing order.
  std::vector<std::uint32_t> draw(RngStream& stream) const;

 private:
  enum class Mode { kSingle, kUniform, kGeneral };

  std::vector<double> weights_;
  std::size_t k_;
  Mode mode_;
  std::vector<double> cumulative_;
  // log e_r(w_j, ..., w_{n-1}) at [j * (k + 1) + r].
  std::vector<double> log_esp_;
};

}  // namespace sublab::kernels

#endif  // SUBLAB_KERNELS_WEIGHTED_SUBSET_HPP_
