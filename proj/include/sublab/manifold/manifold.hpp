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

#ifndef SUBLAB_MANIFOLD_MANIFOLD_HPP_
#define SUBLAB_MANIFOLD_MANIFOLD_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "sublab/core/dataset.hpp"
#include "sublab/core/rng.hpp"
#include "sublab/cvars/control_variates.hpp"
#include "sublab/models/sampling.hpp"

namespace sublab::manifold {

/// Datasets that share responses, the first m covariate rows and the control
/// variate values t with `base`. Free coordinates are the covariates of rows
/// i >= m, flattened as (i - m) d + j.
struct ManifoldConstraint {
  Dataset base;
  std::size_t prefix = 0;
  cvars::ControlVariateSet cv;
  /// Support of the covariate law; also the density used for acceptance.
  models::CovariateLaw gamma;

  const Eigen::VectorXd& target() const { return cv.values; }
  /// Number of smooth constraints (rows of the differentiable parts of T).
  std::size_t smooth_rows() const;
  std::size_t free_dim() const { return (base.n() - prefix) * base.d(); }
  /// Throws std::invalid_argument unless T(base) = t within 1e-10, the base
  /// lies in the box and prefix <= n - k - 1.
  void validate() const;
};

Eigen::VectorXd free_coordinates(const Dataset& data, std::size_t prefix);
Dataset with_free_coordinates(const Dataset& data, std::size_t prefix, const Eigen::VectorXd& x);

/// Smooth part of T and its Jacobian over the free coordinates.
Eigen::VectorXd smooth_values(const cvars::ControlVariateSet& cv, const Dataset& data);
Eigen::MatrixXd smooth_jacobian(const cvars::ControlVariateSet& cv, const Dataset& data,
                                std::size_t prefix);

/// Orthonormal basis (columns) of the null space of the smooth Jacobian at
/// the base. Throws std::runtime_error naming the statistic when the Jacobian
/// is rank deficient.
Eigen::MatrixXd tangent_basis(const ManifoldConstraint& mc);

struct ManifoldConfig {
  /// Step scale s; 0 means 0.05 times the smallest box half-width.
  double step = 0.0;
  /// Largest allowed |s|; 0 means the default step.
  double trust_radius = 0.0;
  double tolerance = 1e-10;
  int max_newton = 50;

  double resolved_step(const models::CovariateLaw& gamma) const;
  double resolved_trust(const models::CovariateLaw& gamma) const;
};

struct Retraction {
  bool ok = false;
  Eigen::VectorXd x;
  double residual = 0.0;
  /// ||result - (x + s v)||.
  double correction = 0.0;
  int iterations = 0;
  std::string cause;
};

/// Newton projection of x + s v onto {T = t}, correcting along the row space
/// of the Jacobian at x. Rejected (ok = false, cause set) on non-convergence,
/// MLE failure, leaving the box, or a grid statistic changing cell.
Retraction retract(const ManifoldConstraint& mc, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                   double s, const ManifoldConfig& config = {});

struct ManifoldStep {
  bool accepted = false;
  std::string cause;
  double residual = 0.0;
};

/// V uniform on the unit sphere of the tangent space, S uniform on [-s, s],
/// retract, then Metropolis on the covariate density of the free rows.
/// Updates mc.base in place when accepted.
ManifoldStep manifold_mh_step(ManifoldConstraint& mc, RngStream& stream,
                              const ManifoldConfig& config = {});

struct Coupling {
  Dataset z2;
  std::size_t accepted = 0;
  std::size_t proposed = 0;
  double residual = 0.0;
};

/// Walks `walk_steps` manifold steps from Z1; step t uses stream.child(t).
/// With prefix > n - k - 1 there is no room to move and Z1 is returned.
Coupling couple_datasets(const Dataset& z1, const cvars::ControlVariateSet& cv,
                         const models::CovariateLaw& gamma, std::size_t prefix,
                         std::size_t walk_steps, const RngStream& stream,
                         const ManifoldConfig& config = {});

/// FNV-1a over the bytes of the first m covariate rows and all responses.
std::uint64_t prefix_hash(const Dataset& data, std::size_t m);

}  // namespace sublab::manifold

#endif  // SUBLAB_MANIFOLD_MANIFOLD_HPP_
