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

#ifndef SUBLAB_DIAGNOSTICS_COVERING_HPP_
#define SUBLAB_DIAGNOSTICS_COVERING_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sublab/core/rng.hpp"
#include "sublab/kernels/kernel.hpp"

namespace sublab::diagnostics {

/// max(1, n - k - 1).
std::size_t default_cover_threshold(std::size_t n, std::size_t k);

/// Type-1 empirical quantile: the ceil(q R)-th smallest value. +inf entries
/// (censored runs) sort last.
double empirical_quantile(std::vector<double> values, double q);

struct CoveringOptions {
  /// Defaults to default_cover_threshold(n, batch_size).
  std::optional<std::size_t> threshold;
  std::size_t batch_size = 1;
  double quantile = 0.99;
  std::size_t replicates = 500;
  std::size_t max_steps = 1000000;
  unsigned threads = 1;
};

struct CoveringResult {
  double tau = 0.0;
  double quantile = 0.0;
  std::size_t threshold = 0;
  /// First-cover step per replicate, +inf when censored.
  std::vector<double> times;
  std::size_t censored = 0;
  /// More than 10% of replicates censored; tau is then only a lower bound.
  bool lower_bound = false;
};

using StartState = std::function<kernels::KernelState(RngStream&)>;

/// Replicate r starts from start(stream.child(r).child(0)) and runs with
/// step stream stream.child(r).child(1).child(t), stopping once the cumulative
/// usage reaches the threshold.
CoveringResult covering_time(const kernels::Kernel& kernel, const kernels::Target& target,
                             const StartState& start, const CoveringOptions& options,
                             const RngStream& stream);

struct CouponOptions {
  std::size_t k = 1;
  /// Empty means uniform.
  std::vector<double> weights;
  double bound_a = 1.0;
  std::size_t replicates = 1000;
  unsigned threads = 1;
};

/// Draws i.i.d. k-subsets with P[S] ∝ prod w_i until all n indices are seen;
/// returns the number of draws per replicate. Replicate r uses stream.child(r).
std::vector<std::size_t> coupon_sim(std::size_t n, const CouponOptions& options,
                                    const RngStream& stream);

double harmonic_number(std::size_t n);

}  // namespace sublab::diagnostics

#endif  // SUBLAB_DIAGNOSTICS_COVERING_HPP_
