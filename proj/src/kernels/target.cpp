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

#include "sublab/kernels/target.hpp"

#include <cmath>
#include <stdexcept>

namespace sublab::kernels {

double Target::log_likelihood_sum(std::span<const std::uint32_t> indices,
                                  const Eigen::VectorXd& theta) const {
  double s = 0.0;
  for (std::uint32_t i : indices) s += datum_log_likelihood(i, theta);
  return s;
}

double Target::full_log_likelihood(const Eigen::VectorXd& theta) const {
  double s = 0.0;
  const std::size_t count = n();
  for (std::size_t i = 0; i < count; ++i) s += datum_log_likelihood(i, theta);
  return s;
}

double Target::log_density(const Eigen::VectorXd& theta) const {
  const double lp = log_prior(theta);
  if (!std::isfinite(lp)) return lp;
  return lp + full_log_likelihood(theta);
}

GlmTarget::GlmTarget(models::GlmModel model, Dataset data)
    : model_(std::move(model)), data_(std::move(data)) {
  models::validate(model_, data_);
  log_a_.resize(data_.n());
  for (std::size_t i = 0; i < data_.n(); ++i) {
    log_a_[i] = model_.family.log_a(data_.responses[static_cast<Eigen::Index>(i)]);
  }
}

double GlmTarget::log_prior(const Eigen::VectorXd& theta) const {
  return model_.prior.log_density(theta);
}

double GlmTarget::datum_log_likelihood(std::size_t i, const Eigen::VectorXd& theta) const {
  // Strided row access without materializing the row.
  const auto r = static_cast<Eigen::Index>(i);
  double eta = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) eta += data_.covariates(r, j) * theta[j];
  const models::GlmFamily& f = model_.family;
  return (eta * data_.responses[r] - f.c(eta)) / f.dispersion() + log_a_[i];
}

ToyTarget::ToyTarget(models::ToyModel model, Dataset data)
    : model_(model), data_(std::move(data)) {
  if (data_.covariates.cols() < 1) throw std::invalid_argument("ToyTarget: needs one covariate column");
}

double ToyTarget::log_prior(const Eigen::VectorXd& theta) const {
  return models::toy_log_prior(model_, theta[0]);
}

double ToyTarget::datum_log_likelihood(std::size_t i, const Eigen::VectorXd& theta) const {
  return models::toy_datum_log_likelihood(model_, data_.covariates(static_cast<Eigen::Index>(i), 0),
                                          theta[0]);
}

}  // namespace sublab::kernels
