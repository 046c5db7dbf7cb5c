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

#ifndef SUBLAB_KERNELS_TARGET_HPP_
#define SUBLAB_KERNELS_TARGET_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sublab/core/dataset.hpp"
#include "sublab/models/glm.hpp"
#include "sublab/models/toy.hpp"

namespace sublab::kernels {

/// Posterior p(theta | Z) ∝ prior(theta) prod_i l_i(theta), exposed one datum
/// at a time so kernels touch only the data they select.
class Target {
 public:
  virtual ~Target() = default;

  virtual const Dataset& data() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual double log_prior(const Eigen::VectorXd& theta) const = 0;
  virtual double datum_log_likelihood(std::size_t i, const Eigen::VectorXd& theta) const = 0;

  std::size_t n() const { return data().n(); }
  /// Sequential sum in the given order.
  double log_likelihood_sum(std::span<const std::uint32_t> indices,
                            const Eigen::VectorXd& theta) const;
  /// Sequential sum over i = 0..n-1.
  double full_log_likelihood(const Eigen::VectorXd& theta) const;
  double log_density(const Eigen::VectorXd& theta) const;
};

class GlmTarget final : public Target {
 public:
  GlmTarget(models::GlmModel model, Dataset data);

  const Dataset& data() const override { return data_; }
  Eigen::Index dim() const override { return data_.covariates.cols(); }
  double log_prior(const Eigen::VectorXd& theta) const override;
  double datum_log_likelihood(std::size_t i, const Eigen::VectorXd& theta) const override;
  const models::GlmModel& model() const { return model_; }

 private:
  models::GlmModel model_;
  Dataset data_;
  std::vector<double> log_a_;
};

/// Observations in covariate column 0; theta is one-dimensional.
class ToyTarget final : public Target {
 public:
  ToyTarget(models::ToyModel model, Dataset data);

  const Dataset& data() const override { return data_; }
  Eigen::Index dim() const override { return 1; }
  double log_prior(const Eigen::VectorXd& theta) const override;
  double datum_log_likelihood(std::size_t i, const Eigen::VectorXd& theta) const override;
  const models::ToyModel& model() const { return model_; }

 private:
  models::ToyModel model_;
  Dataset data_;
};

}  // namespace sublab::kernels

#endif  // SUBLAB_KERNELS_TARGET_HPP_
