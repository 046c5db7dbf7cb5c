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

#ifndef SUBLAB_CORE_RNG_HPP_
#define SUBLAB_CORE_RNG_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

namespace sublab {

/// Counter-based random stream (Philox4x32-10).
///
/// The draw at position `p` of stream `(seed, stream_id)` is a pure function of
/// those three numbers, so replicate streams can be derived without shared
/// state and a run reproduces bit-for-bit regardless of thread count.
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t position() const noexcept { return position_; }

  /// Independent stream keyed by `(stream_id, id)`; never aliases the parent.
  RngStream child(std::uint64_t id) const noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); unbiased (Lemire's multiply-and-reject).
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller; the paired deviate is cached.
  double normal() noexcept;

  /// Uniform in-place shuffle (Fisher-Yates), independent of the standard
  /// library's unspecified std::shuffle algorithm.
  template <typename T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t position_ = 0;
  std::uint64_t block_counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// SplitMix64 finalizer; used for key derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

namespace detail {
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);
}  // namespace detail

}  // namespace sublab

#endif  // SUBLAB_CORE_RNG_HPP_
