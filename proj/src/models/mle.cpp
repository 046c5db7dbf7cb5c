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

#include "sublab/models/mle.hpp"

#include <cmath>
#include <stdexcept>

namespace sublab::models {

std::string to_string(MleStatus status) {
  switch (status) {
    case MleStatus::kConverged: return "converged";
    case MleStatus::kMaxIterations: return "max_iterations";
    case MleStatus::kSeparation: return "separation";
    case MleStatus::kSingularHessian: return "singular_hessian";
  }
  return "unknown";
}

namespace {

// A converged iterate that is beaten by its own double along the ray is the
// vanishing gradient of a separated dataset, not a maximizer.
MleStatus classify_converged(const GlmModel& model, const Dataset& data, const MleResult& r,
                             double ll) {
  if (r.beta.norm() > 1.0 && log_likelihood(model, data, 2.0 * r.beta) > ll) {
    return MleStatus::kSeparation;
  }
  return MleStatus::kConverged;
}

}  // namespace

MleResult mle(const GlmModel& model, const Dataset& data, const MleOptions& options) {
  const Eigen::Index d = data.covariates.cols();
  MleResult result;
  result.beta = options.initial.value_or(Eigen::VectorXd::Zero(d));
  double ll = log_likelihood(model, data, result.beta);
  Eigen::VectorXd g = score(model, data, result.beta);
  result.gradient_norm = g.norm();

  double best_stalled_norm = INFINITY;
  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it;
    if (result.gradient_norm <= options.gradient_tolerance) {
      result.status = classify_converged(model, data, result, ll);
      return result;
    }
    const Eigen::MatrixXd neg_hess = -mle_jacobian(model, data, result.beta);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
      // A flat likelihood that keeps improving along the ray through beta is
      // separation caught before the norm bound; anything else is singular.
      const bool diverging = result.beta.norm() > 1.0 &&
                             log_likelihood(model, data, 2.0 * result.beta) > ll;
      result.status = diverging ? MleStatus::kSeparation : MleStatus::kSingularHessian;
      return result;
    }
    const Eigen::VectorXd step = ldlt.solve(g);

    // Halve until the log-likelihood does not decrease.
    double t = 1.0;
    Eigen::VectorXd candidate = result.beta + step;
    double cand_ll = log_likelihood(model, data, candidate);
    int halvings = 0;
    while (!(cand_ll >= ll) && halvings < 60) {
      t *= 0.5;
      candidate = result.beta + t * step;
      cand_ll = log_likelihood(model, data, candidate);
      ++halvings;
    }
    const Eigen::VectorXd cand_g = score(model, data, candidate);
    const double cand_norm = cand_g.norm();
    if (halvings == 60 || (cand_ll == ll && cand_norm >= result.gradient_norm)) {
      // Rounding floor: the objective no longer moves. Accept if the score is
      // already tiny on the scale of the data, otherwise report failure.
      if (result.gradient_norm <= 1e-7 * std::max(1.0, static_cast<double>(data.n()))) {
        result.status = classify_converged(model, data, result, ll);
      }
      return result;
    }
    result.beta = candidate;
    ll = cand_ll;
    g = cand_g;
    result.gradient_norm = cand_norm;
    if (!std::isfinite(result.beta.norm()) || result.beta.norm() > options.separation_norm) {
      result.status = MleStatus::kSeparation;
      return result;
    }
    if (step.norm() * t <= 1e-15 * (1.0 + result.beta.norm())) {
      if (result.gradient_norm < best_stalled_norm) {
        best_stalled_norm = result.gradient_norm;
      } else if (result.gradient_norm <= 1e-7 * std::max(1.0, static_cast<double>(data.n()))) {
        result.status = classify_converged(model, data, result, ll);
        return result;
      }
    }
  }
  result.iterations = options.max_iterations;
  result.status = result.gradient_norm <= options.gradient_tolerance
                      ? classify_converged(model, data, result, ll)
                      : MleStatus::kMaxIterations;
  return result;
}

Eigen::VectorXd mle_or_throw(const GlmModel& model, const Dataset& data,
                             const MleOptions& options) {
  MleResult r = mle(model, data, options);
  if (!r.ok()) {
    throw std::runtime_error("MLE failed: " + to_string(r.status) + " after " +
                             std::to_string(r.iterations) + " iterations, |score| = " +
                             std::to_string(r.gradient_norm));
  }
  return r.beta;
}

}  // namespace sublab::models
