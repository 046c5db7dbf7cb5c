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

#include "sublab/kernels/weighted_subset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sublab/kernels/subsampling.hpp"

namespace sublab::kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

WeightedSubsetSampler::WeightedSubsetSampler(std::vector<double> weights, std::size_t k)
    : weights_(std::move(weights)), k_(k) {
  const std::size_t n = weights_.size();
  if (k_ > n) throw std::invalid_argument("weighted subset: k exceeds n");
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("weighted subset: weights must be positive");
  }
  const bool constant =
      std::all_of(weights_.begin(), weights_.end(), [&](double w) { return w == weights_.front(); });
  if (k_ == 1 && !constant) {
    mode_ = Mode::kSingle;
    cumulative_.resize(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) cumulative_[i] = (s += weights_[i]);
    return;
  }
  if (constant) {
    mode_ = Mode::kUniform;
    return;
  }
  mode_ = Mode::kGeneral;
  log_esp_.assign((n + 1) * (k_ + 1), kNegInf);
  log_esp_[n * (k_ + 1)] = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    const double lw = std::log(weights_[j]);
    for (std::size_t r = 0; r <= k_; ++r) {
      double v = log_esp_[(j + 1) * (k_ + 1) + r];
      if (r > 0) v = log_add(v, lw + log_esp_[(j + 1) * (k_ + 1) + r - 1]);
      log_esp_[j * (k_ + 1) + r] = v;
    }
  }
}

std::vector<std::uint32_t> WeightedSubsetSampler::draw(RngStream& stream) const {
  std::vector<std::uint32_t> out;
  out.reserve(k_);
  const std::size_t n = weights_.size();
  switch (mode_) {
    case Mode::kSingle: {
      const double u = stream.uniform() * cumulative_.back();
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      out.push_back(static_cast<std::uint32_t>(std::min<std::size_t>(it - cumulative_.begin(), n - 1)));
      return out;
    }
    case Mode::kUniform: {
      PartialShuffle shuffle(n, k_);
      for (std::size_t i = 0; i < k_; ++i) out.push_back(shuffle.next(stream));
      std::sort(out.begin(), out.end());
      return out;
    }
    case Mode::kGeneral: {
      std::size_t r = k_;
      for (std::size_t j = 0; j < n && r > 0; ++j) {
        const double log_p = std::log(weights_[j]) + log_esp_[(j + 1) * (k_ + 1) + r - 1] -
                             log_esp_[j * (k_ + 1) + r];
        if (std::log(stream.uniform()) < log_p) {
          out.push_back(static_cast<std::uint32_t>(j));
          --r;
        }
      }
      return out;
    }
  }
  return out;
}

}  // namespace sublab::kernels
