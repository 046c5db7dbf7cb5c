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

#ifndef SUBLAB_MODELS_SAMPLING_HPP_
#define SUBLAB_MODELS_SAMPLING_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sublab/core/dataset.hpp"
#include "sublab/core/rng.hpp"
#include "sublab/models/glm.hpp"

namespace sublab::models {

/// Covariate law gamma: a product of bounded intervals, optionally with a
/// mean-zero Gaussian density truncated to that box.
struct CovariateLaw {
  enum class Kind { kUniformBox, kTruncatedGaussian } kind = Kind::kUniformBox;
  std::vector<double> lower;
  std::vector<double> upper;
  double gaussian_sd = 1.0;

  /// Uniform on [-1, 1]^d.
  static CovariateLaw unit_box(std::size_t d);
  static CovariateLaw box(std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const { return lower.size(); }
  bool contains(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  /// Log density up to a constant; -inf outside the box.
  double log_density(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  Eigen::RowVectorXd sample(RngStream& stream) const;
  /// Throws std::invalid_argument unless lower <= upper componentwise.
  void validate() const;
};

/// Draws a response from the family at linear predictor eta.
double sample_response(const GlmFamily& family, double eta, RngStream& stream);

/// Covariates i.i.d. from gamma; responses conditionally independent at beta0.
Dataset sample_dataset(const GlmFamily& family, const Eigen::VectorXd& beta0,
                       const CovariateLaw& gamma, std::size_t n, RngStream& stream);

nlohmann::json to_json(const CovariateLaw& gamma);
CovariateLaw covariate_law_from_json(const nlohmann::json& j);

/// One row per datum: x_1..x_d, y.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);

/// Sidecar describing how a dataset was produced; `control_variates` is filled
/// by callers that attach precomputed statistics.
nlohmann::json dataset_sidecar(const GlmFamily& family, const Dataset& data,
                               const CovariateLaw& gamma, std::uint64_t seed,
                               std::uint64_t stream_id);

}  // namespace sublab::models

#endif  // SUBLAB_MODELS_SAMPLING_HPP_
