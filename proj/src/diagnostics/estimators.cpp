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

#include "sublab/diagnostics/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace sublab::diagnostics {
namespace {

// Autocorrelations rho_0..rho_{n-1} by zero-padded FFT.
std::vector<double> autocorrelation(std::span<const double> x, double mean, double* gamma0) {
  const std::size_t n = x.size();
  std::size_t size = 1;
  while (size < 2 * n) size <<= 1;
  std::vector<double> padded(size, 0.0);
  for (std::size_t i = 0; i < n; ++i) padded[i] = x[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, padded);
  for (auto& c : freq) c = std::norm(c);
  std::vector<double> acov;
  fft.inv(acov, freq);
  *gamma0 = acov[0] / static_cast<double>(n);
  std::vector<double> rho(n);
  for (std::size_t k = 0; k < n; ++k) rho[k] = acov[k] / acov[0];
  return rho;
}

}  // namespace

IatEstimate iat_ess(std::span<const double> values) {
  IatEstimate out;
  out.length = values.size();
  if (values.size() < 2) throw std::invalid_argument("iat_ess: need at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  out.mean = mean;
  const bool constant =
      std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  if (constant) {
    out.iat = out.ess = out.asymptotic_variance = std::numeric_limits<double>::quiet_NaN();
    out.reliable = false;
    out.note = "constant trace";
    return out;
  }
  double gamma0 = 0.0;
  const std::vector<double> rho = autocorrelation(values, mean, &gamma0);
  out.variance = gamma0;
  double sum = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < rho.size(); ++m) {
    double pair = rho[2 * m] + rho[2 * m + 1];
    if (!(pair > 0.0)) break;
    pair = std::min(pair, previous);
    previous = pair;
    sum += pair;
  }
  out.iat = std::max(-1.0 + 2.0 * sum, 1e-12);
  out.asymptotic_variance = gamma0 * out.iat;
  out.ess = static_cast<double>(values.size()) / out.iat;
  if (values.size() < 1000) {
    out.reliable = false;
    out.note = "trace shorter than 1000";
  } else if (out.iat > static_cast<double>(values.size()) / 10.0) {
    out.reliable = false;
    out.note = "IAT exceeds length/10";
  }
  return out;
}

IatEstimate iat_ess(const ChainTrace& trace,
                    const std::function<double(const Eigen::VectorXd&)>& phi) {
  std::vector<double> v;
  v.reserve(trace.states.size());
  for (const auto& s : trace.states) v.push_back(phi(s));
  return iat_ess(v);
}

Histogram::Histogram(double lower, double upper, std::size_t bins)
    : lower_(lower), upper_(upper), counts_(bins, 0) {
  if (bins == 0 || !(upper > lower)) throw std::invalid_argument("histogram: need bins > 0 and lower < upper");
}

void Histogram::add(double x) {
  const double pos = (x - lower_) / (upper_ - lower_) * static_cast<double>(counts_.size());
  std::size_t b = 0;
  if (pos >= static_cast<double>(counts_.size())) {
    b = counts_.size() - 1;
  } else if (pos > 0.0) {
    b = static_cast<std::size_t>(pos);
  }
  ++counts_[b];
  ++total_;
}

void Histogram::add(std::span<const double> xs) {
  for (double x : xs) add(x);
}

std::vector<double> Histogram::probabilities() const {
  std::vector<double> p(counts_.size(), 0.0);
  if (total_ == 0) return p;
  for (std::size_t b = 0; b < p.size(); ++b) {
    p[b] = static_cast<double>(counts_[b]) / static_cast<double>(total_);
  }
  return p;
}

std::vector<double> bin_probabilities(const std::function<double(double)>& cdf, double lower,
                                      double upper, std::size_t bins) {
  std::vector<double> p(bins);
  const double w = (upper - lower) / static_cast<double>(bins);
  double prev = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double next = b + 1 == bins ? 1.0 : cdf(lower + static_cast<double>(b + 1) * w);
    p[b] = next - prev;
    prev = next;
  }
  return p;
}

double histogram_tv(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("histogram_tv: bin count mismatch");
  double s = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) s += std::abs(p[b] - q[b]);
  return 0.5 * s;
}

double mc_error_floor(std::span<const double> p, double ess, double second_ess) {
  const double scale = 1.0 / ess + (std::isfinite(second_ess) ? 1.0 / second_ess : 0.0);
  const double c = std::sqrt(2.0 / std::numbers::pi);
  double s = 0.0;
  for (double pb : p) s += c * std::sqrt(std::max(0.0, pb * (1.0 - pb)) * scale);
  return 0.5 * s;
}

}  // namespace sublab::diagnostics
