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

#ifndef SUBLAB_KERNELS_SUBSAMPLING_HPP_
#define SUBLAB_KERNELS_SUBSAMPLING_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sublab/kernels/kernel.hpp"
#include "sublab/kernels/weighted_subset.hpp"

namespace sublab::kernels {

/// Random-walk Metropolis on the full posterior.
class FullMh final : public Kernel {
 public:
  explicit FullMh(double proposal_scale = 1.0) : scale_(proposal_scale) {}

  std::string name() const override { return "full_mh"; }
  nlohmann::json config_json() const override;
  StepResult step(const KernelState& state, const Target& target,
                  RngStream& stream) const override;

 private:
  double scale_;
};

struct GenericConfig {
  double proposal_scale = 1.0;
  std::size_t batch_size = 10;
  /// Batches keep growing while a fresh uniform exceeds delta; 1 means one batch.
  double delta = 1.0;
  std::size_t max_batches = 1000;

  void validate() const;
};

/// Draws positions uniformly without replacement from {0..n-1}, one at a
/// time, by a lazily materialized Fisher-Yates shuffle.
class PartialShuffle {
 public:
  PartialShuffle(std::size_t n, std::size_t expected);
  std::uint32_t next(RngStream& stream);
  std::size_t drawn() const { return drawn_; }

 private:
  std::uint32_t at(std::uint32_t i) const;
  void set(std::uint32_t i, std::uint32_t v);

  std::size_t n_;
  std::size_t drawn_ = 0;
  bool dense_;
  std::vector<std::uint32_t> values_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> sparse_;
};

/// Grow a uniform batch, propose by random walk, accept with the subsampled
/// MH ratio rescaled by n / |batch|. Not invariant for the posterior.
class GenericSubsampler final : public Kernel {
 public:
  explicit GenericSubsampler(GenericConfig config);

  std::string name() const override { return "generic"; }
  nlohmann::json config_json() const override;
  StepResult step(const KernelState& state, const Target& target,
                  RngStream& stream) const override;

  const GenericConfig& config() const { return config_; }
  /// Batch positions in draw order; nullopt when growth passes max_batches.
  std::optional<std::vector<std::uint32_t>> draw_positions(std::size_t n, RngStream& batch,
                                                           RngStream& growth) const;
  /// Proposal and accept/reject given the batch (any order).
  StepResult complete(const KernelState& state, const Target& target,
                      std::vector<std::uint32_t> batch, RngStream& stream) const;

 private:
  GenericConfig config_;
};

/// Shared MH move: accept theta* with log-ratio prior + scale * (sum l(theta*) - sum l(theta))
/// over the sorted batch.
StepResult subsampled_mh(const KernelState& state, const Target& target,
                         const std::vector<std::uint32_t>& sorted_batch, double proposal_half_width,
                         RngStream& stream);

/// Single batch of size k drawn with probability proportional to the product
/// of per-datum weights, each in [1/A, A].
class InformedSubsampler final : public Kernel {
 public:
  InformedSubsampler(GenericConfig config, std::vector<double> weights, double bound_a);

  std::string name() const override { return "informed"; }
  nlohmann::json config_json() const override;
  StepResult step(const KernelState& state, const Target& target,
                  RngStream& stream) const override;

  /// Exact draw of a k-subset, sorted.
  std::vector<std::uint32_t> draw_batch(RngStream& stream) const { return sampler_.draw(stream); }

 private:
  GenericConfig config_;
  double bound_a_;
  WeightedSubsetSampler sampler_;
};

/// Wraps a uniform-batch kernel. Data identities are permuted once at
/// construction and fresh data are taken in that order, so the cumulative
/// usage after any number of steps is the label prefix {0..M-1}; M lives in
/// KernelState::scan_pos.
class PermutationWrapper final : public Kernel {
 public:
  PermutationWrapper(std::shared_ptr<const GenericSubsampler> inner, std::size_t n,
                     RngStream permutation_stream);

  std::string name() const override { return "permutation(" + inner_->name() + ")"; }
  nlohmann::json config_json() const override;
  KernelState initial_state(const Eigen::VectorXd& theta, const Target& target,
                            RngStream& stream) const override;
  StepResult step(const KernelState& state, const Target& target,
                  RngStream& stream) const override;

  /// Raw datum index carrying label l.
  const std::vector<std::uint32_t>& permutation() const { return perm_; }

 private:
  std::shared_ptr<const GenericSubsampler> inner_;
  std::vector<std::uint32_t> perm_;
};

}  // namespace sublab::kernels

#endif  // SUBLAB_KERNELS_SUBSAMPLING_HPP_
