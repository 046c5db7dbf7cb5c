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

#ifndef SUBLAB_CERTIFICATE_CERTIFICATE_HPP_
#define SUBLAB_CERTIFICATE_CERTIFICATE_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sublab/core/rng.hpp"
#include "sublab/models/glm.hpp"
#include "sublab/models/sampling.hpp"

namespace sublab::certificate {

/// Number of index pairs j <= k for d covariates.
std::size_t pair_count(std::size_t d);

/// Coefficients, ordered (1,1), (1,2), ..., (1,d), (2,2), ..., of v in the
/// derivative along xi of the Jacobian-sensitivity inner product at x.
/// F = (b'' y - c'') / d(sigma) with b'' = 0 for canonical families.
Eigen::VectorXd coefficient_vector(const models::GlmFamily& family, const Eigen::VectorXd& beta,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& xi);

enum class Verdict { kPass, kInconclusive };
std::string to_string(Verdict v);

struct Probe {
  Eigen::VectorXd x;
  Eigen::VectorXd xi;
  Eigen::VectorXd coefficients;
};

struct CertificateResult {
  Verdict verdict = Verdict::kInconclusive;
  std::vector<Probe> probes;
  Eigen::VectorXd singular_values;
  std::size_t rank = 0;
  std::size_t m = 0;
  /// Basis of the common null space; a single vector is scaled so its first
  /// non-negligible entry is 1.
  std::vector<Eigen::VectorXd> annihilators;

  Eigen::MatrixXd coefficient_matrix() const;
  nlohmann::json to_json() const;
};

/// Probe p uses stream.child(p): x uniform on the box, xi uniform on the
/// sphere. Stops at the first probe that brings the rank to m.
/// Throws std::invalid_argument when max_probes < m + 1.
CertificateResult certify(const models::GlmFamily& family, const Eigen::VectorXd& beta,
                          std::size_t max_probes, const RngStream& stream,
                          std::optional<models::CovariateLaw> box = std::nullopt);

/// Numerical rank with threshold rel * sigma_max.
std::size_t numerical_rank(const Eigen::VectorXd& singular_values, double rel = 1e-8);

struct MonitorResult {
  std::size_t n = 0;
  std::vector<double> sigma_min;  // sorted
  double q01 = 0.0;
  double q50 = 0.0;
  /// Some replicate has sigma_min <= 1e-10 * sigma_max.
  bool singular = false;

  nlohmann::json to_json() const;
};

/// Replicate r draws n covariates from gamma with stream.child(r) and takes
/// the smallest singular value of the MLE Jacobian at beta.
MonitorResult min_singular_monitor(const models::GlmModel& model, const Eigen::VectorXd& beta,
                                   std::size_t n, const models::CovariateLaw& gamma,
                                   std::size_t replicates, const RngStream& stream,
                                   unsigned threads = 1);

struct MonitorSweep {
  std::vector<MonitorResult> rows;
  /// Largest over smallest 1% quantile of sigma_min / n across the sweep.
  double spread = 1.0;
  /// spread > 2, or a singular replicate.
  bool flagged = false;

  nlohmann::json to_json() const;
};

/// Entry i of ns uses stream.child(i).
MonitorSweep min_singular_sweep(const models::GlmModel& model, const Eigen::VectorXd& beta,
                                const std::vector<std::size_t>& ns,
                                const models::CovariateLaw& gamma, std::size_t replicates,
                                const RngStream& stream, unsigned threads = 1);

}  // namespace sublab::certificate

#endif  // SUBLAB_CERTIFICATE_CERTIFICATE_HPP_
