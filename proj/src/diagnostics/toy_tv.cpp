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

#include "sublab/diagnostics/toy_tv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sublab/diagnostics/tv.hpp"

namespace sublab::diagnostics {

std::size_t sqrt_subsample_size(std::size_t n) {
  auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (m > 0 && (m - 1) * (m - 1) >= n) --m;
  while (m * m < n) ++m;
  return m;
}

SubsampleTv subsample_posterior_tv(const models::ToyModel& model, const Dataset& data,
                                   std::size_t m, double tolerance) {
  const std::size_t n = data.n();
  if (m > n) throw std::invalid_argument("subsample_posterior_tv: m exceeds n");
  std::vector<double> obs(n);
  for (std::size_t i = 0; i < n; ++i) obs[i] = data.covariates(static_cast<Eigen::Index>(i), 0);
  const auto full = models::toy_posterior(model, std::span<const double>(obs));
  const auto sub = models::toy_posterior(model, std::span<const double>(obs.data(), m));

  SubsampleTv out{n, m, 0.0, 0.0};
  double lo = 0.0, hi = 0.0;
  if (full.kind == models::ToyPosterior::Kind::kNormal) {
    out.closed_form = tv_normal(full.mean, full.sd(), sub.mean, sub.sd());
    lo = std::min(full.mean - 15 * full.sd(), sub.mean - 15 * sub.sd());
    hi = std::max(full.mean + 15 * full.sd(), sub.mean + 15 * sub.sd());
  } else {
    out.closed_form = tv_exponential(full.rate, sub.rate);
    hi = 40.0 / std::min(full.rate, sub.rate);
  }
  out.quadrature = tv_distance([&](double t) { return full.log_density(t); },
                               [&](double t) { return sub.log_density(t); }, lo, hi, tolerance);
  return out;
}

}  // namespace sublab::diagnostics
