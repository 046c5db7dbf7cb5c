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

#include "sublab/kernels/subsampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sublab::kernels {

StepResult subsampled_mh(const KernelState& state, const Target& target,
                         const std::vector<std::uint32_t>& sorted_batch,
                         double proposal_half_width, RngStream& stream) {
  RngStream prop = stream.child(purpose::kProposal);
  RngStream acc = stream.child(purpose::kAccept);
  StepResult r;
  r.state = state;
  const Eigen::VectorXd proposal = uniform_proposal(state.theta, proposal_half_width, prop);
  const double log_u = std::log(acc.uniform());
  const double prior_new = target.log_prior(proposal);
  if (std::isfinite(prior_new) && !sorted_batch.empty()) {
    const double scale = static_cast<double>(target.n()) / static_cast<double>(sorted_batch.size());
    const std::span<const std::uint32_t> idx(sorted_batch);
    const double delta = (prior_new - target.log_prior(state.theta)) +
                         scale * (target.log_likelihood_sum(idx, proposal) -
                                  target.log_likelihood_sum(idx, state.theta));
    if (log_u < delta) {
      r.state.theta = proposal;
      r.accepted = true;
    }
  } else if (std::isfinite(prior_new) && target.n() == 0) {
    if (log_u < prior_new - target.log_prior(state.theta)) {
      r.state.theta = proposal;
      r.accepted = true;
    }
  }
  return r;
}

nlohmann::json FullMh::config_json() const {
  return {{"kind", "full_mh"}, {"proposal_scale", scale_}};
}

StepResult FullMh::step(const KernelState& state, const Target& target, RngStream& stream) const {
  RngStream prop = stream.child(purpose::kProposal);
  RngStream acc = stream.child(purpose::kAccept);
  StepResult r;
  r.state = state;
  r.used = UsedIndices::everything();
  const Eigen::VectorXd proposal =
      uniform_proposal(state.theta, scaled_half_width(scale_, target.n()), prop);
  const double log_u = std::log(acc.uniform());
  const double prior_new = target.log_prior(proposal);
  if (!std::isfinite(prior_new)) return r;
  // Same arithmetic as subsampled_mh with the whole dataset as batch.
  const double delta = (prior_new - target.log_prior(state.theta)) +
                       (target.full_log_likelihood(proposal) - target.full_log_likelihood(state.theta));
  if (log_u < delta) {
    r.state.theta = proposal;
    r.accepted = true;
  }
  return r;
}

void GenericConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("generic kernel: batch size k must be >= 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("generic kernel: delta must lie in [0, 1]");
  if (max_batches < 1) throw std::invalid_argument("generic kernel: max_batches must be >= 1");
  if (!(proposal_scale > 0.0)) throw std::invalid_argument("generic kernel: proposal scale must be > 0");
}

PartialShuffle::PartialShuffle(std::size_t n, std::size_t expected)
    : n_(n), dense_(expected * 8 >= n) {
  if (dense_) {
    values_.resize(n);
    std::iota(values_.begin(), values_.end(), 0u);
  }
}

std::uint32_t PartialShuffle::at(std::uint32_t i) const {
  if (dense_) return values_[i];
  for (const auto& [k, v] : sparse_) {
    if (k == i) return v;
  }
  return i;
}

void PartialShuffle::set(std::uint32_t i, std::uint32_t v) {
  if (dense_) {
    values_[i] = v;
    return;
  }
  for (auto& [k, val] : sparse_) {
    if (k == i) {
      val = v;
      return;
    }
  }
  sparse_.emplace_back(i, v);
}

std::uint32_t PartialShuffle::next(RngStream& stream) {
  if (drawn_ >= n_) throw std::logic_error("PartialShuffle: population exhausted");
  const auto t = static_cast<std::uint32_t>(drawn_);
  const auto j = static_cast<std::uint32_t>(t + stream.uniform_index(n_ - drawn_));
  const std::uint32_t vj = at(j);
  set(j, at(t));
  set(t, vj);
  ++drawn_;
  return vj;
}

GenericSubsampler::GenericSubsampler(GenericConfig config) : config_(config) {
  config_.validate();
}

nlohmann::json GenericSubsampler::config_json() const {
  return {{"kind", "generic"},
          {"proposal_scale", config_.proposal_scale},
          {"batch_size", config_.batch_size},
          {"delta", config_.delta},
          {"max_batches", config_.max_batches}};
}

std::optional<std::vector<std::uint32_t>> GenericSubsampler::draw_positions(
    std::size_t n, RngStream& batch, RngStream& growth) const {
  const std::size_t k = std::min(config_.batch_size, n);
  PartialShuffle shuffle(n, k);
  std::vector<std::uint32_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(shuffle.next(batch));
  std::size_t batches = 1;
  while (out.size() < n && growth.uniform() > config_.delta) {
    if (batches >= config_.max_batches) return std::nullopt;
    const std::size_t more = std::min(config_.batch_size, n - out.size());
    for (std::size_t i = 0; i < more; ++i) out.push_back(shuffle.next(batch));
    ++batches;
  }
  return out;
}

StepResult GenericSubsampler::complete(const KernelState& state, const Target& target,
                                       std::vector<std::uint32_t> batch, RngStream& stream) const {
  std::vector<std::uint32_t> sorted = batch;
  std::sort(sorted.begin(), sorted.end());
  StepResult r = subsampled_mh(state, target, sorted,
                               scaled_half_width(config_.proposal_scale, target.n()), stream);
  if (sorted.size() == target.n()) {
    r.used = UsedIndices::everything();
  } else {
    r.used.indices = std::move(batch);
  }
  return r;
}

StepResult GenericSubsampler::step(const KernelState& state, const Target& target,
                                   RngStream& stream) const {
  RngStream batch = stream.child(purpose::kBatch);
  RngStream growth = stream.child(purpose::kGrowth);
  auto positions = draw_positions(target.n(), batch, growth);
  if (!positions) {
    StepResult r;
    r.state = state;
    r.status = StepStatus::kAborted;
    r.failure = "batch growth exceeded max_batches = " + std::to_string(config_.max_batches);
    return r;
  }
  return complete(state, target, std::move(*positions), stream);
}

namespace {

const std::vector<double>& checked_weights(const std::vector<double>& w, double bound_a) {
  if (!(bound_a >= 1.0)) throw std::invalid_argument("informed kernel: weight bound A must be >= 1");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 1.0 / bound_a && w[i] <= bound_a)) {
      throw std::invalid_argument("informed kernel: weight " + std::to_string(i) + " = " +
                                  std::to_string(w[i]) + " lies outside [1/A, A]");
    }
  }
  return w;
}

}  // namespace

InformedSubsampler::InformedSubsampler(GenericConfig config, std::vector<double> weights,
                                       double bound_a)
    : config_(config),
      bound_a_(bound_a),
      sampler_(checked_weights(weights, bound_a), std::min(config.batch_size, weights.size())) {
  config_.validate();
}

nlohmann::json InformedSubsampler::config_json() const {
  return {{"kind", "informed"},
          {"proposal_scale", config_.proposal_scale},
          {"batch_size", config_.batch_size},
          {"weight_bound", bound_a_}};
}

StepResult InformedSubsampler::step(const KernelState& state, const Target& target,
                                    RngStream& stream) const {
  if (target.n() != sampler_.n()) throw std::invalid_argument("informed kernel: weights do not match n");
  RngStream batch_stream = stream.child(purpose::kBatch);
  std::vector<std::uint32_t> batch = draw_batch(batch_stream);
  StepResult r = subsampled_mh(state, target, batch,
                               scaled_half_width(config_.proposal_scale, target.n()), stream);
  r.used.indices = std::move(batch);
  return r;
}

PermutationWrapper::PermutationWrapper(std::shared_ptr<const GenericSubsampler> inner,
                                       std::size_t n, RngStream permutation_stream)
    : inner_(std::move(inner)), perm_(n) {
  std::iota(perm_.begin(), perm_.end(), 0u);
  permutation_stream.shuffle(std::span<std::uint32_t>(perm_));
}

nlohmann::json PermutationWrapper::config_json() const {
  return {{"kind", "permutation"}, {"inner", inner_->config_json()}};
}

KernelState PermutationWrapper::initial_state(const Eigen::VectorXd& theta, const Target& target,
                                              RngStream& stream) const {
  KernelState s = inner_->initial_state(theta, target, stream);
  s.scan_pos = 0;
  return s;
}

StepResult PermutationWrapper::step(const KernelState& state, const Target& target,
                                    RngStream& stream) const {
  if (target.n() != perm_.size()) throw std::invalid_argument("permutation wrapper: n mismatch");
  RngStream batch = stream.child(purpose::kBatch);
  RngStream growth = stream.child(purpose::kGrowth);
  auto positions = inner_->draw_positions(target.n(), batch, growth);
  if (!positions) {
    StepResult r;
    r.state = state;
    r.status = StepStatus::kAborted;
    r.failure = "batch growth exceeded max_batches";
    return r;
  }
  // Old positions keep their labels; each new one takes the next unused label.
  std::size_t m = state.scan_pos;
  std::vector<std::uint32_t> old_raw, new_raw;
  for (std::uint32_t p : *positions) {
    if (p < state.scan_pos) {
      old_raw.push_back(perm_[p]);
    } else {
      new_raw.push_back(perm_[m++]);
    }
  }
  std::vector<std::uint32_t> sorted = old_raw;
  sorted.insert(sorted.end(), new_raw.begin(), new_raw.end());
  std::sort(sorted.begin(), sorted.end());
  StepResult r = subsampled_mh(state, target, sorted,
                               scaled_half_width(inner_->config().proposal_scale, target.n()),
                               stream);
  r.state.scan_pos = m;
  // Report fresh data in label order so first-use order follows the labels.
  r.used.indices = std::move(old_raw);
  r.used.indices.insert(r.used.indices.end(), new_raw.begin(), new_raw.end());
  return r;
}

}  // namespace sublab::kernels
