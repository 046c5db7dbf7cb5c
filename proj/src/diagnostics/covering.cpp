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

#include "sublab/diagnostics/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sublab/core/ledger.hpp"
#include "sublab/core/parallel.hpp"
#include "sublab/kernels/weighted_subset.hpp"

namespace sublab::diagnostics {

std::size_t default_cover_threshold(std::size_t n, std::size_t k) {
  return n > k + 2 ? n - k - 1 : 1;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: no values");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("empirical_quantile: q must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

CoveringResult covering_time(const kernels::Kernel& kernel, const kernels::Target& target,
                             const StartState& start, const CoveringOptions& options,
                             const RngStream& stream) {
  if (options.replicates == 0) throw std::invalid_argument("covering_time: need replicates > 0");
  const std::size_t n = target.n();
  CoveringResult out;
  out.quantile = options.quantile;
  out.threshold = options.threshold.value_or(default_cover_threshold(n, options.batch_size));
  if (out.threshold > n) throw std::invalid_argument("covering_time: threshold exceeds n");
  const double inf = std::numeric_limits<double>::infinity();
  out.times = parallel_map(options.replicates, options.threads, [&](std::size_t r) {
    const RngStream rep = stream.child(r);
    RngStream init = rep.child(0);
    const RngStream steps = rep.child(1);
    kernels::KernelState state = start(init);
    UsageLedger ledger(n);
    for (std::size_t t = 1; t <= options.max_steps; ++t) {
      RngStream s = steps.child(t);
      kernels::StepResult res = kernel.step(state, target, s);
      if (res.status != kernels::StepStatus::kOk) {
        throw std::runtime_error("covering_time: step aborted: " + res.failure);
      }
      ledger.record(res.used);
      if (ledger.cumulative_size() >= out.threshold) return static_cast<double>(t);
      state = std::move(res.state);
    }
    return inf;
  });
  out.censored = static_cast<std::size_t>(std::count(out.times.begin(), out.times.end(), inf));
  out.lower_bound = 10 * out.censored > options.replicates;
  out.tau = empirical_quantile(out.times, options.quantile);
  if (out.lower_bound && !std::isfinite(out.tau)) out.tau = static_cast<double>(options.max_steps);
  return out;
}

std::vector<std::size_t> coupon_sim(std::size_t n, const CouponOptions& options,
                                    const RngStream& stream) {
  if (n == 0 || options.k == 0 || options.k > n) {
    throw std::invalid_argument("coupon_sim: need 1 <= k <= n");
  }
  if (!(options.bound_a >= 1.0)) throw std::invalid_argument("coupon_sim: A must be >= 1");
  std::vector<double> w = options.weights.empty() ? std::vector<double>(n, 1.0) : options.weights;
  if (w.size() != n) throw std::invalid_argument("coupon_sim: weight vector length differs from n");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w[i] >= 1.0 / options.bound_a && w[i] <= options.bound_a)) {
      throw std::invalid_argument("coupon_sim: weight " + std::to_string(i) + " outside [1/A, A]");
    }
  }
  const kernels::WeightedSubsetSampler sampler(std::move(w), options.k);
  return parallel_map(options.replicates, options.threads, [&](std::size_t r) {
    RngStream s = stream.child(r);
    std::vector<std::uint8_t> seen(n, 0);
    std::size_t covered = 0, draws = 0;
    while (covered < n) {
      ++draws;
      for (std::uint32_t i : sampler.draw(s)) {
        if (!seen[i]) {
          seen[i] = 1;
          ++covered;
        }
      }
    }
    return draws;
  });
}

double harmonic_number(std::size_t n) {
  double h = 0.0;
  for (std::size_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

}  // namespace sublab::diagnostics
