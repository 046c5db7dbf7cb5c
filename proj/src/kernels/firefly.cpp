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

#include "sublab/kernels/firefly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sublab/kernels/subsampling.hpp"

namespace sublab::kernels {
namespace {

double log_sigmoid(double t) {
  return t >= 0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void FireflyConfig::validate() const {
  if (!(resample_fraction > 0.0 && resample_fraction <= 1.0)) {
    throw std::invalid_argument("firefly: resample fraction must lie in (0, 1]");
  }
  if (!(bound_scale > 0.0 && bound_scale <= 1.0)) {
    throw std::invalid_argument("firefly: bound scale must lie in (0, 1]");
  }
  if (!(proposal_scale > 0.0)) throw std::invalid_argument("firefly: proposal scale must be > 0");
}

double LogisticBound::lambda(double xi) {
  if (std::abs(xi) < 1e-6) return 0.125 - xi * xi / 192.0;
  return std::tanh(xi / 2.0) / (4.0 * xi);
}

double LogisticBound::log_bound(double t, double xi) {
  return log_sigmoid(xi) + (t - xi) / 2.0 - lambda(xi) * (t * t - xi * xi);
}

Firefly::Firefly(FireflyConfig config, const Dataset& data, const Eigen::VectorXd& anchor)
    : config_(config) {
  config_.validate();
  if (anchor.size() != data.covariates.cols()) throw std::invalid_argument("firefly: anchor dimension");
  const Eigen::Index d = data.covariates.cols();
  const std::size_t n = data.n();
  xi_.resize(n);
  linear_ = Eigen::VectorXd::Zero(d);
  quadratic_ = Eigen::MatrixXd::Zero(d, d);
  constant_ = static_cast<double>(n) * std::log(config_.bound_scale);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.covariates.row(static_cast<Eigen::Index>(i));
    const double y = data.responses[static_cast<Eigen::Index>(i)];
    if (y != 0.0 && y != 1.0) throw std::invalid_argument("firefly: logistic responses must be 0/1");
    const double s = 2.0 * y - 1.0;
    const double xi = std::abs(row.dot(anchor.transpose()));
    const double lam = LogisticBound::lambda(xi);
    xi_[i] = xi;
    constant_ += log_sigmoid(xi) - xi / 2.0 + lam * xi * xi;
    linear_ += 0.5 * s * row.transpose();
    quadratic_ += lam * row.transpose() * row;
  }
}

nlohmann::json Firefly::config_json() const {
  return {{"kind", "firefly"},
          {"proposal_scale", config_.proposal_scale},
          {"resample_fraction", config_.resample_fraction},
          {"bound_scale", config_.bound_scale},
          {"usage", config_.bright_only_usage ? "bright" : "touched"}};
}

double Firefly::datum_log_bound(const Target& target, std::size_t i,
                                const Eigen::VectorXd& beta) const {
  const Dataset& data = target.data();
  const auto idx = static_cast<Eigen::Index>(i);
  const double s = 2.0 * data.responses[idx] - 1.0;
  const double t = s * data.covariates.row(idx).dot(beta.transpose());
  return std::log(config_.bound_scale) + LogisticBound::log_bound(t, xi_[i]);
}

double Firefly::total_log_bound(const Eigen::VectorXd& beta) const {
  return constant_ + linear_.dot(beta) - beta.dot(quadratic_ * beta);
}

// log((L - B) / B) = log(expm1(log L - log B)).
double Firefly::bright_term(const Target& target, std::size_t i, const Eigen::VectorXd& beta) const {
  const double log_l = target.datum_log_likelihood(i, beta);
  const double log_b = datum_log_bound(target, i, beta);
  double gap = log_l - log_b;
  if (gap < 0.0) {
    if (gap < -1e-10 * std::max(1.0, std::abs(log_l))) {
      throw std::runtime_error("firefly: lower bound exceeds likelihood for datum " +
                               std::to_string(i) + "; the chain would not be exact");
    }
    gap = 0.0;
  }
  return gap == 0.0 ? kNegInf : std::log(std::expm1(gap));
}

double Firefly::bright_probability(const Target& target, std::size_t i,
                                   const Eigen::VectorXd& beta) const {
  const double log_l = target.datum_log_likelihood(i, beta);
  const double log_b = datum_log_bound(target, i, beta);
  if (log_b - log_l > 1e-10 * std::max(1.0, std::abs(log_l))) {
    throw std::runtime_error("firefly: lower bound exceeds likelihood for datum " + std::to_string(i));
  }
  return std::clamp(-std::expm1(log_b - log_l), 0.0, 1.0);
}

double Firefly::joint_log_density(const KernelState& state, const Target& target) const {
  double v = target.log_prior(state.theta) + total_log_bound(state.theta);
  for (std::size_t i = 0; i < state.bright.size(); ++i) {
    if (state.bright[i]) v += bright_term(target, i, state.theta);
  }
  return v;
}

KernelState Firefly::initial_state(const Eigen::VectorXd& theta, const Target& target,
                                   RngStream& stream) const {
  KernelState s = Kernel::initial_state(theta, target, stream);
  s.bright.assign(target.n(), 0);
  for (std::size_t i = 0; i < target.n(); ++i) {
    s.bright[i] = stream.bernoulli(bright_probability(target, i, theta)) ? 1 : 0;
  }
  return s;
}

StepResult Firefly::step(const KernelState& state, const Target& target, RngStream& stream) const {
  const std::size_t n = target.n();
  if (state.bright.size() != n || xi_.size() != n) {
    throw std::invalid_argument("firefly: state or kernel built for a different n");
  }
  StepResult r;
  r.state = state;

  // Refresh brightness on a uniform subset.
  RngStream batch = stream.child(purpose::kBatch);
  RngStream bright = stream.child(purpose::kBrightness);
  const auto count = static_cast<std::size_t>(
      std::ceil(config_.resample_fraction * static_cast<double>(n) - 1e-9));
  std::vector<std::uint32_t> refreshed;
  refreshed.reserve(count);
  PartialShuffle shuffle(n, count);
  for (std::size_t c = 0; c < count; ++c) refreshed.push_back(shuffle.next(batch));
  std::sort(refreshed.begin(), refreshed.end());
  for (std::uint32_t i : refreshed) {
    r.state.bright[i] = bright.bernoulli(bright_probability(target, i, state.theta)) ? 1 : 0;
  }

  // MH on beta given brightness.
  std::vector<std::uint32_t> lit;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.state.bright[i]) lit.push_back(static_cast<std::uint32_t>(i));
  }
  RngStream prop = stream.child(purpose::kProposal);
  RngStream acc = stream.child(purpose::kAccept);
  const Eigen::VectorXd proposal =
      uniform_proposal(state.theta, scaled_half_width(config_.proposal_scale, n), prop);
  const double log_u = std::log(acc.uniform());
  const double prior_new = target.log_prior(proposal);
  if (std::isfinite(prior_new)) {
    double delta = prior_new - target.log_prior(state.theta) + total_log_bound(proposal) -
                   total_log_bound(state.theta);
    for (std::uint32_t i : lit) {
      delta += bright_term(target, i, proposal) - bright_term(target, i, state.theta);
    }
    if (log_u < delta) {
      r.state.theta = proposal;
      r.accepted = true;
    }
  }

  if (config_.bright_only_usage) {
    r.used.indices = std::move(lit);
  } else {
    std::vector<std::uint32_t> used;
    std::set_union(refreshed.begin(), refreshed.end(), lit.begin(), lit.end(),
                   std::back_inserter(used));
    if (used.size() == n) {
      r.used = UsedIndices::everything();
    } else {
      r.used.indices = std::move(used);
    }
  }
  return r;
}

}  // namespace sublab::kernels
