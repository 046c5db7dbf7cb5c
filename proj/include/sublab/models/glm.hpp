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

#ifndef SUBLAB_MODELS_GLM_HPP_
#define SUBLAB_MODELS_GLM_HPP_

#include <limits>
#include <string>

#include <Eigen/Dense>

#include "sublab/core/dataset.hpp"

namespace sublab::models {

enum class FamilyKind { kLogistic, kBinomial, kPoisson, kGaussianIdentity };

/// Canonical-form exponential family: b(x) = x, so a datum contributes
/// [(x'beta) y - c(x'beta)] / d(sigma) + log a(y, sigma) to the log-likelihood.
class GlmFamily {
 public:
  static GlmFamily logistic() { return GlmFamily(FamilyKind::kLogistic, 1, 1.0); }
  static GlmFamily binomial(int trials) { return GlmFamily(FamilyKind::kBinomial, trials, 1.0); }
  static GlmFamily poisson() { return GlmFamily(FamilyKind::kPoisson, 1, 1.0); }
  /// c(x) = x^2 / 2, d = sigma^2. Used by the certificate as the family whose
  /// nonsingularity condition fails.
  static GlmFamily gaussian_identity(double sigma = 1.0) {
    return GlmFamily(FamilyKind::kGaussianIdentity, 1, sigma);
  }

  FamilyKind kind() const { return kind_; }
  int trials() const { return trials_; }
  double sigma() const { return sigma_; }
  std::string name() const;

  /// c and its first four derivatives. For logistic-type families c is
  /// evaluated as x + log1p(e^-x) above x = 30 so large predictors never overflow.
  double c(double x) const;
  double c1(double x) const;
  double c2(double x) const;
  double c3(double x) const;
  double c4(double x) const;
  double log_a(double y) const;
  double dispersion() const;  // d(sigma)

  bool valid_response(double y) const;

 private:
  GlmFamily(FamilyKind kind, int trials, double sigma)
      : kind_(kind), trials_(trials), sigma_(sigma) {}

  FamilyKind kind_;
  int trials_;
  double sigma_;
};

GlmFamily family_from_name(const std::string& name, int trials = 1);

/// Mean-zero Gaussian prior with covariance sd^2 I, or flat when sd is infinite.
struct Prior {
  double sd = 1.0;

  static Prior flat() { return Prior{std::numeric_limits<double>::infinity()}; }
  bool is_flat() const { return !(sd < std::numeric_limits<double>::infinity()); }
  double log_density(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;
  Eigen::MatrixXd hessian(Eigen::Index d) const;
};

struct GlmModel {
  GlmFamily family = GlmFamily::logistic();
  Prior prior{};
};

/// Throws std::invalid_argument on dimension mismatch or invalid responses.
void validate(const GlmModel& model, const Dataset& data);

/// Log-likelihood contribution of one datum with linear predictor eta.
double datum_log_likelihood_eta(const GlmFamily& family, double eta, double y);

/// Log-likelihood contribution of one datum.
double datum_log_likelihood(const GlmFamily& family, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                            double y, const Eigen::VectorXd& beta);

double log_likelihood(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta);
Eigen::VectorXd score(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta);

/// Unnormalized: log p0(beta) + sum_i [(x_i beta) y_i - c(x_i beta)] / d + sum_i log a(y_i).
double log_posterior(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta);
Eigen::VectorXd grad_log_posterior(const GlmModel& model, const Dataset& data,
                                   const Eigen::VectorXd& beta);
Eigen::MatrixXd hessian_log_posterior(const GlmModel& model, const Dataset& data,
                                      const Eigen::VectorXd& beta);

/// J_jk = -sum_i x_ij x_ik c''(x_i beta) / d; the Jacobian in beta of the
/// likelihood equations (prior excluded).
Eigen::MatrixXd mle_jacobian(const GlmModel& model, const Dataset& data,
                             const Eigen::VectorXd& beta);

/// D_ij: derivative of the log-posterior in covariate x_ij.
double sensitivity_D(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta,
                     std::size_t i, std::size_t j);
/// Largest |second derivative of the posterior density in two covariates|
/// relative to the density, over all index tuples.
double sensitivity_Dmax(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta);

}  // namespace sublab::models

#endif  // SUBLAB_MODELS_GLM_HPP_
