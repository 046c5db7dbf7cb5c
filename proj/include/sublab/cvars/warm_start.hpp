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

#ifndef SUBLAB_CVARS_WARM_START_HPP_
#define SUBLAB_CVARS_WARM_START_HPP_

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

#include "sublab/core/rng.hpp"

namespace sublab::cvars {

/// Uniform law on the ball B(center, radius).
struct WarmStart {
  Eigen::VectorXd center;
  double radius = 1.0;
  double c_w = 1.0;

  /// radius = n^-c_w; c_w must lie in [0.5, 2].
  static WarmStart around(const Eigen::VectorXd& center, std::size_t n, double c_w = 1.0);

  double ball_volume() const;
  double density(const Eigen::VectorXd& x) const;
};

Eigen::VectorXd warm_start_sample(const WarmStart& ws, RngStream& stream);

struct RatioOptions {
  double relative_tolerance = 1e-9;
  int max_refinements = 14;
  /// Nodes per axis used for the supremum over the ball.
  int sup_nodes = 401;
  /// The integration box grows until the log-density on its boundary is this
  /// far below the mode.
  double tail_drop = 40.0;
};

struct WarmStartRatio {
  double ratio = 0.0;
  double log_normalizer = 0.0;
  int refinements = 0;
};

/// sup over nodes in the ball of warm density / normalized posterior density,
/// with the normalizer from composite Simpson quadrature (d <= 2). Throws
/// std::runtime_error with the last estimates if the quadrature does not
/// settle.
WarmStartRatio warm_start_ratio(const WarmStart& ws,
                                const std::function<double(const Eigen::VectorXd&)>& log_density,
                                const RatioOptions& options = {});

}  // namespace sublab::cvars

#endif  // SUBLAB_CVARS_WARM_START_HPP_
