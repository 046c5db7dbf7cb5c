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

#ifndef SUBLAB_MANIFOLD_FLUCTUATION_HPP_
#define SUBLAB_MANIFOLD_FLUCTUATION_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sublab/core/rng.hpp"
#include "sublab/cvars/control_variates.hpp"
#include "sublab/manifold/manifold.hpp"
#include "sublab/models/glm.hpp"
#include "sublab/models/sampling.hpp"
#include "sublab/models/toy.hpp"

namespace sublab::manifold {

struct FluctuationConfig {
  enum class ModelKind { kGlm, kToy } model_kind = ModelKind::kGlm;
  models::GlmModel glm;
  Eigen::VectorXd beta0 = Eigen::VectorXd::Ones(1);
  models::CovariateLaw gamma = models::CovariateLaw::unit_box(1);
  /// Toy observations live in covariate column 0 and are walked like covariates;
  /// their box is the observed range widened by one on each side.
  models::ToyModel toy;

  std::size_t n = 200;
  std::size_t prefix = 10;
  cvars::CvKind cv_kind = cvars::CvKind::kMle;
  /// Grid exponent for grid and composite (mle + grid) statistics.
  double grid_exponent = 0.0;
  std::size_t replicates = 100;
  std::size_t walk_steps = 1000;
  ManifoldConfig manifold;
  double tv_tolerance = 1e-6;
  std::size_t max_resamples = 20;
  unsigned threads = 1;
};

struct FluctuationRow {
  std::size_t replicate = 0;
  bool ok = false;
  std::string error;
  double tv = 0.0;
  double acceptance = 0.0;
  double residual = 0.0;
  std::uint64_t prefix_hash = 0;
  bool prefix_preserved = false;
};

struct FluctuationResult {
  std::vector<FluctuationRow> rows;
  std::size_t failures = 0;

  std::vector<double> tvs() const;
  /// Empirical q-quantile of the TVs of successful replicates.
  double quantile(double q) const;
};

/// Replicate r uses stream.child(r): child(0).child(a) for the a-th attempt at
/// drawing Z1 and child(1) for the walk.
FluctuationResult fluctuation_experiment(const FluctuationConfig& config, const RngStream& stream);

/// Columns replicate, tv, acceptance, residual, prefix_hash, status.
void write_fluctuation_csv(std::ostream& out, const FluctuationResult& result);

}  // namespace sublab::manifold

#endif  // SUBLAB_MANIFOLD_FLUCTUATION_HPP_
