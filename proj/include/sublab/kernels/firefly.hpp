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

#ifndef SUBLAB_KERNELS_FIREFLY_HPP_
#define SUBLAB_KERNELS_FIREFLY_HPP_

#include <cstddef>
#include <vector>

#include "sublab/kernels/kernel.hpp"

namespace sublab::kernels {

struct FireflyConfig {
  double proposal_scale = 1.0;
  /// Fraction of brightness variables refreshed per step, in (0, 1].
  double resample_fraction = 0.1;
  /// Multiplies every lower bound by kappa in (0, 1]; values below 1 loosen
  /// the bound and raise the bright fraction.
  double bound_scale = 1.0;
  /// When true the ledger sees only the bright set after each step, which is
  /// the accounting used by the coupon-collector covering argument. The
  /// default reports every datum read (refreshed or bright).
  bool bright_only_usage = false;

  void validate() const;
};

/// Per-datum quadratic lower bound on the logistic log-likelihood, tangent at
/// the anchor linear predictor:
///   log sigma(t) >= log sigma(xi) + (t - xi) / 2 - lambda(xi) (t^2 - xi^2),
///   lambda(xi) = tanh(xi / 2) / (4 xi),  t = (2y - 1) x beta,  xi = |x beta_hat|.
struct LogisticBound {
  static double lambda(double xi);
  static double log_bound(double t, double xi);
};

/// Exact data augmentation on (beta, brightness). Dark data contribute their
/// lower bound through precomputed aggregates; bright data contribute
/// log(L - B) - log B.
class Firefly final : public Kernel {
 public:
  /// Aggregates are computed from `data` here, like any control variate; the
  /// anchor is typically the MLE.
  Firefly(FireflyConfig config, const Dataset& data, const Eigen::VectorXd& anchor);

  std::string name() const override { return "firefly"; }
  nlohmann::json config_json() const override;
  KernelState initial_state(const Eigen::VectorXd& theta, const Target& target,
                            RngStream& stream) const override;
  StepResult step(const KernelState& state, const Target& target,
                  RngStream& stream) const override;

  /// log B_i(beta) for one datum, kappa included.
  double datum_log_bound(const Target& target, std::size_t i, const Eigen::VectorXd& beta) const;
  /// sum_i log B_i(beta) from the aggregates; touches no data.
  double total_log_bound(const Eigen::VectorXd& beta) const;
  /// Probability that datum i is bright at beta: 1 - B_i / L_i.
  double bright_probability(const Target& target, std::size_t i, const Eigen::VectorXd& beta) const;
  /// Joint log density of (beta, z) up to a constant.
  double joint_log_density(const KernelState& state, const Target& target) const;

 private:
  double bright_term(const Target& target, std::size_t i, const Eigen::VectorXd& beta) const;

  FireflyConfig config_;
  std::vector<double> xi_;
  double constant_ = 0.0;
  Eigen::VectorXd linear_;
  Eigen::MatrixXd quadratic_;
};

}  // namespace sublab::kernels

#endif  // SUBLAB_KERNELS_FIREFLY_HPP_
