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

#ifndef SUBLAB_CVARS_CONTROL_VARIATES_HPP_
#define SUBLAB_CVARS_CONTROL_VARIATES_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sublab/core/dataset.hpp"
#include "sublab/models/glm.hpp"
#include "sublab/models/mle.hpp"
#include "sublab/models/toy.hpp"

namespace sublab::cvars {

enum class CvKind { kMle, kGrid, kComposite };

std::string to_string(CvKind kind);

/// Statistic map T with its value t on the generating dataset.
struct ControlVariateSet {
  CvKind kind = CvKind::kMle;
  Eigen::VectorXd values;
  /// mle kind only; exactly one of these is set.
  std::optional<models::GlmModel> model;
  std::optional<models::ToyModel> toy_model;
  models::MleOptions mle_options;
  /// grid kind only: lattice spacing is n^-a.
  double grid_exponent = 0.0;
  /// composite kind only.
  std::vector<ControlVariateSet> parts;

  std::size_t k() const { return static_cast<std::size_t>(values.size()); }
  /// Recomputes T on `data`; throws std::runtime_error if an MLE fails.
  Eigen::VectorXd evaluate(const Dataset& data) const;
};

/// t = MLE of the likelihood (prior excluded). Throws if the MLE fails.
ControlVariateSet mle_cv(const models::GlmModel& model, const Dataset& data,
                         const models::MleOptions& options = {});

/// Closed-form MLE of a toy location model, observations in covariate
/// column 0: the sample mean (gaussian_hierarchy) or n / sum |y|
/// (exponential_tail). k = 1.
ControlVariateSet toy_mle_cv(const models::ToyModel& model, const Dataset& data);

/// Nearest lattice point of the given spacing; ties go toward -inf.
double grid_round(double x, double spacing);
double grid_spacing(std::size_t n, double a);

/// Per-datum rounded covariates, row-major (datum, coordinate); k = n d.
ControlVariateSet grid_cv(const Dataset& data, double a);

/// Concatenation of the parts' values.
ControlVariateSet composite(std::vector<ControlVariateSet> parts);

/// dT/dx_ij over the free rows i >= m, columns ordered (i - m) d + j.
/// The mle kind uses implicit differentiation -J^-1 df/dx and throws
/// std::runtime_error when J is singular. Grid rows are zero.
Eigen::MatrixXd cv_jacobian(const ControlVariateSet& cv, const Dataset& data,
                            std::size_t fixed_prefix);

/// Whether the constraint T(Z) = t is enforced by differentiable rows
/// (grid parts are cell-membership constraints instead).
bool is_differentiable(const ControlVariateSet& cv);

nlohmann::json to_json(const ControlVariateSet& cv);

}  // namespace sublab::cvars

#endif  // SUBLAB_CVARS_CONTROL_VARIATES_HPP_
