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

#ifndef SUBLAB_CORE_DATASET_HPP_
#define SUBLAB_CORE_DATASET_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sublab {

/// Covariates (n x d) and responses (n). Toy location models keep their
/// observations in covariate column 0 and leave `responses` at zero, so the
/// coupled-dataset machinery can move them like any other covariate.
struct Dataset {
  Eigen::MatrixXd covariates;
  Eigen::VectorXd responses;
  std::optional<Eigen::VectorXd> true_param;

  Dataset() = default;
  Dataset(Eigen::MatrixXd x, Eigen::VectorXd y,
          std::optional<Eigen::VectorXd> beta0 = std::nullopt)
      : covariates(std::move(x)), responses(std::move(y)), true_param(std::move(beta0)) {
    if (covariates.rows() != responses.size()) {
      throw std::invalid_argument("Dataset: covariates and responses disagree on n");
    }
    if (true_param && true_param->size() != covariates.cols()) {
      throw std::invalid_argument("Dataset: true_param length differs from d");
    }
  }

  std::size_t n() const { return static_cast<std::size_t>(covariates.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(covariates.cols()); }

  /// Reorders data rows: row i of the result is row perm[i] of this dataset.
  Dataset permuted(const std::vector<std::size_t>& perm) const;
};

}  // namespace sublab

#endif  // SUBLAB_CORE_DATASET_HPP_
