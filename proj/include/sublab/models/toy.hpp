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

#ifndef SUBLAB_MODELS_TOY_HPP_
#define SUBLAB_MODELS_TOY_HPP_

#include <span>

#include "sublab/core/dataset.hpp"
#include "sublab/core/rng.hpp"

namespace sublab::models {

/// gaussian_hierarchy: mu ~ N(0, 1), y_i | mu ~ N(mu, 1).
/// exponential_tail:   theta ~ Exp(1) on (0, inf), p(y | theta) ∝ e^{-theta |y|}.
enum class ToyVariant { kGaussianHierarchy, kExponentialTail };

struct ToyModel {
  ToyVariant variant = ToyVariant::kGaussianHierarchy;
};

/// Closed-form univariate posterior.
struct ToyPosterior {
  enum class Kind { kNormal, kExponential } kind = Kind::kNormal;
  double mean = 0.0;
  double variance = 1.0;
  double rate = 1.0;

  static ToyPosterior normal(double m, double v) { return {Kind::kNormal, m, v, 1.0}; }
  static ToyPosterior exponential(double r) { return {Kind::kExponential, 1.0 / r, 1.0 / (r * r), r}; }

  double log_density(double theta) const;
  double density(double theta) const;
  double sd() const;
};

/// Observations are read from covariate column 0.
ToyPosterior toy_posterior(const ToyModel& model, const Dataset& data);
ToyPosterior toy_posterior(const ToyModel& model, std::span<const double> observations);

/// Unnormalized log posterior, for quadrature and MCMC targets.
double toy_log_posterior(const ToyModel& model, const Dataset& data, double theta);
double toy_datum_log_likelihood(const ToyModel& model, double observation, double theta);
double toy_log_prior(const ToyModel& model, double theta);

/// Draws the parameter from the prior, then n observations given it.
Dataset sample_toy_dataset(const ToyModel& model, std::size_t n, RngStream& stream,
                           double* parameter = nullptr);

}  // namespace sublab::models

#endif  // SUBLAB_MODELS_TOY_HPP_
