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

#ifndef SUBLAB_MODELS_MLE_HPP_
#define SUBLAB_MODELS_MLE_HPP_

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sublab/models/glm.hpp"

namespace sublab::models {

enum class MleStatus { kConverged, kMaxIterations, kSeparation, kSingularHessian };

std::string to_string(MleStatus status);

struct MleOptions {
  double gradient_tolerance = 1e-10;
  int max_iterations = 200;
  /// Divergence bound on ||beta|| that signals separation.
  double separation_norm = 1e6;
  std::optional<Eigen::VectorXd> initial;
};

/// Maximum-likelihood fit. Callers must check `ok()`; on failure `beta`
/// holds the last iterate and is not an MLE.
struct MleResult {
  Eigen::VectorXd beta;
  MleStatus status = MleStatus::kMaxIterations;
  int iterations = 0;
  double gradient_norm = 0.0;

  bool ok() const { return status == MleStatus::kConverged; }
};

/// Damped Newton on the log-likelihood (prior excluded) with step halving.
MleResult mle(const GlmModel& model, const Dataset& data, const MleOptions& options = {});

/// Like mle() but throws std::runtime_error naming the failure.
Eigen::VectorXd mle_or_throw(const GlmModel& model, const Dataset& data,
                             const MleOptions& options = {});

}  // namespace sublab::models

#endif  // SUBLAB_MODELS_MLE_HPP_
