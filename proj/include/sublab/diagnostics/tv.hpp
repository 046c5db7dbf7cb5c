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

#ifndef SUBLAB_DIAGNOSTICS_TV_HPP_
#define SUBLAB_DIAGNOSTICS_TV_HPP_

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sublab::diagnostics {

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

/// Integration box and refinement controls. Panels double per axis until two
/// successive estimates differ by less than `tolerance`.
struct QuadratureBox {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t initial_panels = 64;
  double tolerance = 1e-6;
  /// Per-axis panel cap; 0 picks 2^22 in 1-D and 2^11 in 2-D.
  std::size_t max_panels = 0;
};

struct TvQuadrature {
  double value = 0.0;
  double previous = 0.0;
  std::size_t panels = 0;
};

class TvNonConvergence : public std::runtime_error {
 public:
  TvNonConvergence(double last, double previous);
  double last;
  double previous;
};

/// 1/2 int |p1 - p2| with each density normalized by its own Simpson integral
/// over the box. Densities may be unnormalized and -inf outside their support.
TvQuadrature tv_quadrature(const LogDensity& log_p1, const LogDensity& log_p2,
                           const QuadratureBox& box);
double tv_distance(const LogDensity& log_p1, const LogDensity& log_p2, const QuadratureBox& box);
double tv_distance(const std::function<double(double)>& log_p1,
                   const std::function<double(double)>& log_p2, double lower, double upper,
                   double tolerance = 1e-6);

/// Closed forms through the density crossing points.
double tv_normal(double mean1, double sd1, double mean2, double sd2);
double tv_exponential(double rate1, double rate2);

double normal_cdf(double z);

}  // namespace sublab::diagnostics

#endif  // SUBLAB_DIAGNOSTICS_TV_HPP_
