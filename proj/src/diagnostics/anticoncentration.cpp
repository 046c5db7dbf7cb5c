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

#include "sublab/diagnostics/anticoncentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sublab::diagnostics {

AntiConcentration anticoncentration_check(const AntiConcentrationSpec& spec, RngStream& stream) {
  const std::size_t m = spec.v.size();
  if (m == 0) throw std::invalid_argument("anticoncentration: empty direction");
  double norm2 = 0.0;
  for (double x : spec.v) norm2 += x * x;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
    throw std::invalid_argument("anticoncentration: v must be a unit vector");
  }
  if (!(spec.epsilon > 0.0) || !(spec.width > 0.0) || spec.samples < 2) {
    throw std::invalid_argument("anticoncentration: need epsilon > 0, width > 0, samples >= 2");
  }
  std::vector<double> s(spec.samples);
  for (auto& x : s) {
    double acc = 0.0;
    for (double vi : spec.v) acc += vi * spec.width * stream.uniform();
    x = acc;
  }
  std::sort(s.begin(), s.end());
  std::size_t best = 0, best_start = 0, hi = 0;
  for (std::size_t lo = 0; lo < s.size(); ++lo) {
    hi = std::max(hi, lo);
    while (hi < s.size() && s[hi] <= s[lo] + spec.epsilon) ++hi;
    if (hi - lo > best) {
      best = hi - lo;
      best_start = lo;
    }
  }
  AntiConcentration out;
  const double total = static_cast<double>(spec.samples);
  out.empirical = static_cast<double>(best) / total;
  out.window_start = s[best_start];
  out.bound = spec.epsilon / spec.width * std::sqrt(static_cast<double>(m));
  out.mc_sigma = std::sqrt(out.empirical * (1.0 - out.empirical) / total);
  out.within_bound = out.empirical <= out.bound + 3.0 * out.mc_sigma;
  return out;
}

double irwin_hall_cdf(std::size_t m, double x) {
  if (m == 0) throw std::invalid_argument("irwin_hall_cdf: m must be positive");
  const double md = static_cast<double>(m);
  if (x <= 0.0) return 0.0;
  if (x >= md) return 1.0;
  double sum = 0.0, binom = 1.0;
  for (std::size_t k = 0; static_cast<double>(k) <= x; ++k) {
    sum += (k % 2 ? -1.0 : 1.0) * binom * std::pow(x - static_cast<double>(k), md);
    binom = binom * static_cast<double>(m - k) / static_cast<double>(k + 1);
  }
  return sum / std::tgamma(md + 1.0);
}

}  // namespace sublab::diagnostics
