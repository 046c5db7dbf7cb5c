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

#include "sublab/models/glm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sublab::models {
namespace {

// log(1 + e^x), switching to x + e^-x above 30 where log1p(e^x) loses e^x.
double softplus(double x) {
  if (x > 30.0) return x + std::exp(-x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_scale(const GlmFamily& f) {
  return f.kind() == FamilyKind::kBinomial ? static_cast<double>(f.trials()) : 1.0;
}

}  // namespace

std::string GlmFamily::name() const {
  switch (kind_) {
    case FamilyKind::kLogistic: return "logistic";
    case FamilyKind::kBinomial: return "binomial";
    case FamilyKind::kPoisson: return "poisson";
    case FamilyKind::kGaussianIdentity: return "gaussian_identity";
  }
  return "unknown";
}

GlmFamily family_from_name(const std::string& name, int trials) {
  if (name == "logistic") return GlmFamily::logistic();
  if (name == "binomial") return GlmFamily::binomial(trials);
  if (name == "poisson") return GlmFamily::poisson();
  if (name == "gaussian_identity") return GlmFamily::gaussian_identity();
  throw std::invalid_argument("unknown GLM family '" + name + "'");
}

double GlmFamily::c(double x) const {
  switch (kind_) {
    case FamilyKind::kLogistic:
    case FamilyKind::kBinomial: return logistic_scale(*this) * softplus(x);
    case FamilyKind::kPoisson: return std::exp(x);
    case FamilyKind::kGaussianIdentity: return 0.5 * x * x;
  }
  return 0.0;
}

double GlmFamily::c1(double x) const {
  switch (kind_) {
    case FamilyKind::kLogistic:
    case FamilyKind::kBinomial: return logistic_scale(*this) * sigmoid(x);
    case FamilyKind::kPoisson: return std::exp(x);
    case FamilyKind::kGaussianIdentity: return x;
  }
  return 0.0;
}

double GlmFamily::c2(double x) const {
  switch (kind_) {
    case FamilyKind::kLogistic:
    case FamilyKind::kBinomial: {
      const double s = sigmoid(x);
      return logistic_scale(*this) * s * (1.0 - s);
    }
    case FamilyKind::kPoisson: return std::exp(x);
    case FamilyKind::kGaussianIdentity: return 1.0;
  }
  return 0.0;
}

double GlmFamily::c3(double x) const {
  switch (kind_) {
    case FamilyKind::kLogistic:
    case FamilyKind::kBinomial: {
      const double s = sigmoid(x);
      return logistic_scale(*this) * s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case FamilyKind::kPoisson: return std::exp(x);
    case FamilyKind::kGaussianIdentity: return 0.0;
  }
  return 0.0;
}

double GlmFamily::c4(double x) const {
  switch (kind_) {
    case FamilyKind::kLogistic:
    case FamilyKind::kBinomial: {
      const double s = sigmoid(x);
      return logistic_scale(*this) * s * (1.0 - s) * (1.0 - 6.0 * s + 6.0 * s * s);
    }
    case FamilyKind::kPoisson: return std::exp(x);
    case FamilyKind::kGaussianIdentity: return 0.0;
  }
  return 0.0;
}

double GlmFamily::log_a(double y) const {
  switch (kind_) {
    case FamilyKind::kLogistic: return 0.0;
    case FamilyKind::kBinomial:
      return std::lgamma(trials_ + 1.0) - std::lgamma(y + 1.0) - std::lgamma(trials_ - y + 1.0);
    case FamilyKind::kPoisson: return -std::lgamma(y + 1.0);
    case FamilyKind::kGaussianIdentity:
      return -0.5 * y * y / (sigma_ * sigma_) -
             0.5 * std::log(2.0 * std::numbers::pi * sigma_ * sigma_);
  }
  return 0.0;
}

double GlmFamily::dispersion() const {
  return kind_ == FamilyKind::kGaussianIdentity ? sigma_ * sigma_ : 1.0;
}

bool GlmFamily::valid_response(double y) const {
  if (!std::isfinite(y)) return false;
  switch (kind_) {
    case FamilyKind::kLogistic: return y == 0.0 || y == 1.0;
    case FamilyKind::kBinomial: return y >= 0 && y <= trials_ && std::floor(y) == y;
    case FamilyKind::kPoisson: return y >= 0 && std::floor(y) == y;
    case FamilyKind::kGaussianIdentity: return true;
  }
  return false;
}

double Prior::log_density(const Eigen::VectorXd& beta) const {
  if (is_flat()) return 0.0;
  const double d = static_cast<double>(beta.size());
  return -0.5 * beta.squaredNorm() / (sd * sd) -
         d * (std::log(sd) + 0.5 * std::log(2.0 * std::numbers::pi));
}

Eigen::VectorXd Prior::gradient(const Eigen::VectorXd& beta) const {
  if (is_flat()) return Eigen::VectorXd::Zero(beta.size());
  return -beta / (sd * sd);
}

Eigen::MatrixXd Prior::hessian(Eigen::Index d) const {
  if (is_flat()) return Eigen::MatrixXd::Zero(d, d);
  return -Eigen::MatrixXd::Identity(d, d) / (sd * sd);
}

void validate(const GlmModel& model, const Dataset& data) {
  if (data.covariates.rows() != data.responses.size()) {
    throw std::invalid_argument("dataset: covariate rows differ from response count");
  }
  for (Eigen::Index i = 0; i < data.responses.size(); ++i) {
    if (!model.family.valid_response(data.responses[i])) {
      throw std::invalid_argument("dataset: response " + std::to_string(data.responses[i]) +
                                  " at row " + std::to_string(i) + " invalid for " +
                                  model.family.name());
    }
  }
}

double datum_log_likelihood_eta(const GlmFamily& family, double eta, double y) {
  return (eta * y - family.c(eta)) / family.dispersion() + family.log_a(y);
}

double datum_log_likelihood(const GlmFamily& family, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                            double y, const Eigen::VectorXd& beta) {
  return datum_log_likelihood_eta(family, x.dot(beta.transpose()), y);
}

double log_likelihood(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = data.covariates * beta;
  const auto& f = model.family;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double y = data.responses[i];
    sum += (eta[i] * y - f.c(eta[i])) / f.dispersion() + f.log_a(y);
  }
  return sum;
}

Eigen::VectorXd score(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = data.covariates * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    resid[i] = (data.responses[i] - model.family.c1(eta[i])) / model.family.dispersion();
  }
  return data.covariates.transpose() * resid;
}

double log_posterior(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta) {
  if (beta.size() != data.covariates.cols()) {
    throw std::invalid_argument("log_posterior: beta dimension differs from d");
  }
  return model.prior.log_density(beta) + log_likelihood(model, data, beta);
}

Eigen::VectorXd grad_log_posterior(const GlmModel& model, const Dataset& data,
                                   const Eigen::VectorXd& beta) {
  return score(model, data, beta) + model.prior.gradient(beta);
}

Eigen::MatrixXd mle_jacobian(const GlmModel& model, const Dataset& data,
                             const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = data.covariates * beta;
  Eigen::VectorXd w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    w[i] = model.family.c2(eta[i]) / model.family.dispersion();
  }
  return -(data.covariates.transpose() * w.asDiagonal() * data.covariates);
}

Eigen::MatrixXd hessian_log_posterior(const GlmModel& model, const Dataset& data,
                                      const Eigen::VectorXd& beta) {
  return mle_jacobian(model, data, beta) + model.prior.hessian(beta.size());
}

double sensitivity_D(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta,
                     std::size_t i, std::size_t j) {
  const auto row = data.covariates.row(static_cast<Eigen::Index>(i));
  const double eta = row.dot(beta.transpose());
  const double y = data.responses[static_cast<Eigen::Index>(i)];
  return beta[static_cast<Eigen::Index>(j)] * (y - model.family.c1(eta)) /
         model.family.dispersion();
}

double sensitivity_Dmax(const GlmModel& model, const Dataset& data, const Eigen::VectorXd& beta) {
  // Every term factors as beta_j beta_j' times a data-only part, so the
  // maximum over (j, j') is max_j |beta_j|^2 and the maximum over i != i' is
  // the product of the two largest |g_i|.
  const double disp = model.family.dispersion();
  const Eigen::VectorXd eta = data.covariates * beta;
  double top1 = 0.0, top2 = 0.0, diag = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double g = (data.responses[i] - model.family.c1(eta[i])) / disp;
    const double h = -model.family.c2(eta[i]) / disp;
    diag = std::max(diag, std::abs(g * g + h));
    const double a = std::abs(g);
    if (a > top1) {
      top2 = top1;
      top1 = a;
    } else if (a > top2) {
      top2 = a;
    }
  }
  const double bmax = beta.size() ? beta.cwiseAbs().maxCoeff() : 0.0;
  const double off = eta.size() > 1 ? top1 * top2 : 0.0;
  return bmax * bmax * std::max(off, diag);
}

}  // namespace sublab::models
