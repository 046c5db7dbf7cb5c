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

#include "sublab/models/toy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace sublab::models {

double ToyPosterior::log_density(double theta) const {
  if (kind == Kind::kNormal) {
    const double z = theta - mean;
    return -0.5 * z * z / variance - 0.5 * std::log(2.0 * std::numbers::pi * variance);
  }
  if (theta < 0) return -std::numeric_limits<double>::infinity();
  return std::log(rate) - rate * theta;
}

double ToyPosterior::density(double theta) const { return std::exp(log_density(theta)); }

double ToyPosterior::sd() const { return std::sqrt(variance); }

ToyPosterior toy_posterior(const ToyModel& model, std::span<const double> obs) {
  const double n = static_cast<double>(obs.size());
  if (model.variant == ToyVariant::kGaussianHierarchy) {
    double sum = 0.0;
    for (double y : obs) sum += y;
    return ToyPosterior::normal(sum / (n + 1.0), 1.0 / (n + 1.0));
  }
  double abs_sum = 0.0;
  for (double y : obs) abs_sum += std::abs(y);
  return ToyPosterior::exponential(1.0 + abs_sum);
}

ToyPosterior toy_posterior(const ToyModel& model, const Dataset& data) {
  std::vector<double> obs(data.n());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    obs[i] = data.n() ? data.covariates(static_cast<Eigen::Index>(i), 0) : 0.0;
  }
  return toy_posterior(model, std::span<const double>(obs));
}

double toy_log_prior(const ToyModel& model, double theta) {
  if (model.variant == ToyVariant::kGaussianHierarchy) return -0.5 * theta * theta;
  return theta > 0 ? -theta : -std::numeric_limits<double>::infinity();
}

double toy_datum_log_likelihood(const ToyModel& model, double y, double theta) {
  if (model.variant == ToyVariant::kGaussianHierarchy) return -0.5 * (y - theta) * (y - theta);
  return -theta * std::abs(y);
}

double toy_log_posterior(const ToyModel& model, const Dataset& data, double theta) {
  double lp = toy_log_prior(model, theta);
  if (!std::isfinite(lp)) return lp;
  for (Eigen::Index i = 0; i < data.covariates.rows(); ++i) {
    lp += toy_datum_log_likelihood(model, data.covariates(i, 0), theta);
  }
  return lp;
}

Dataset sample_toy_dataset(const ToyModel& model, std::size_t n, RngStream& stream,
                           double* parameter) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 1);
  double theta = 0.0;
  if (model.variant == ToyVariant::kGaussianHierarchy) {
    theta = stream.normal();
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = theta + stream.normal();
  } else {
    theta = -std::log1p(-stream.uniform());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double magnitude = -std::log1p(-stream.uniform()) / theta;
      x(i, 0) = stream.bernoulli(0.5) ? magnitude : -magnitude;
    }
  }
  if (parameter) *parameter = theta;
  return Dataset(std::move(x), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)),
                 Eigen::VectorXd::Constant(1, theta));
}

}  // namespace sublab::models
