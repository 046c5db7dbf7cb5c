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

#ifndef SUBLAB_DIAGNOSTICS_ANTICONCENTRATION_HPP_
#define SUBLAB_DIAGNOSTICS_ANTICONCENTRATION_HPP_

#include <cstddef>
#include <vector>

#include "sublab/core/rng.hpp"

namespace sublab::diagnostics {

/// X_1..X_m i.i.d. uniform on [0, width], so rho_max = 1 / width; m = v.size().
struct AntiConcentrationSpec {
  std::vector<double> v;
  double epsilon = 0.1;
  std::size_t samples = 1000000;
  double width = 1.0;
};

struct AntiConcentration {
  /// Largest fraction of samples of sum v_i X_i inside any window of length epsilon.
  double empirical = 0.0;
  /// Left end of that window.
  double window_start = 0.0;
  /// rho_max * epsilon * sqrt(m).
  double bound = 0.0;
  double mc_sigma = 0.0;
  bool within_bound = false;
};

AntiConcentration anticoncentration_check(const AntiConcentrationSpec& spec, RngStream& stream);

/// CDF of the sum of m independent U[0, 1].
double irwin_hall_cdf(std::size_t m, double x);

}  // namespace sublab::diagnostics

#endif  // SUBLAB_DIAGNOSTICS_ANTICONCENTRATION_HPP_
