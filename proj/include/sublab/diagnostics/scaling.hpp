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

#ifndef SUBLAB_DIAGNOSTICS_SCALING_HPP_
#define SUBLAB_DIAGNOSTICS_SCALING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sublab/core/rng.hpp"
#include "sublab/kernels/kernel.hpp"

namespace sublab::diagnostics {

/// n / (gap * tau). Requires gap in (0, 1] and tau >= 1.
double cost(double n, double gap, double tau);

struct ScalingSetup {
  std::unique_ptr<kernels::Kernel> kernel;
  std::unique_ptr<kernels::Target> target;
  kernels::KernelState initial;
};

struct ScalingOptions {
  /// Measured steps at a given n.
  std::function<std::size_t(std::size_t)> steps = [](std::size_t) { return std::size_t{100000}; };
  std::function<std::size_t(std::size_t)> burn_in = [](std::size_t) { return std::size_t{1000}; };
  /// Test function; defaults to theta_0.
  std::function<double(const Eigen::VectorXd&)> phi;
  unsigned threads = 1;
};

struct ScalingRow {
  std::size_t n = 0;
  double ess = 0.0;
  double iat = 0.0;
  std::uint64_t accesses = 0;
  double accesses_per_es = 0.0;
  double acceptance = 0.0;
  std::optional<double> gap;
  std::optional<double> tau;
  std::optional<double> cost;
  bool reliable = true;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  bool reliable = true;
};

/// Least-squares slope and intercept of log y against log x.
std::pair<double, double> fit_loglog(std::span<const double> x, std::span<const double> y);

/// For each n (index i): setup(n, stream.child(i).child(0)), burn in on
/// child(1), then measure on child(2). accesses counts data reads with
/// multiplicity over the measured steps only.
ScalingResult scaling_experiment(std::span<const std::size_t> n_grid,
                                 const std::function<ScalingSetup(std::size_t, RngStream&)>& setup,
                                 const ScalingOptions& options, const RngStream& stream);

/// Refits the slope after rows were edited.
void refit(ScalingResult& result);

/// Columns n, ESS, accesses, accesses_per_ES, gap, tau, cost; absent values
/// are left empty.
void write_scaling_csv(std::ostream& out, const ScalingResult& result);

}  // namespace sublab::diagnostics

#endif  // SUBLAB_DIAGNOSTICS_SCALING_HPP_
