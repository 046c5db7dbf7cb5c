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

#ifndef SUBLAB_DIAGNOSTICS_ESTIMATORS_HPP_
#define SUBLAB_DIAGNOSTICS_ESTIMATORS_HPP_

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sublab/core/trace.hpp"

namespace sublab::diagnostics {

struct IatEstimate {
  double mean = 0.0;
  double variance = 0.0;
  /// Integrated autocorrelation time; NaN for a constant trace.
  double iat = 0.0;
  /// variance * iat.
  double asymptotic_variance = 0.0;
  /// length / iat.
  double ess = 0.0;
  std::size_t length = 0;
  bool reliable = true;
  std::string note;
};

/// Initial monotone sequence estimator on FFT autocovariances. Flags the
/// estimate unreliable for traces shorter than 10^3, constant traces, and
/// IAT above length / 10.
IatEstimate iat_ess(std::span<const double> values);
IatEstimate iat_ess(const ChainTrace& trace,
                    const std::function<double(const Eigen::VectorXd&)>& phi);

/// Fixed-bin histogram on [lower, upper); values outside go to the edge bins.
class Histogram {
 public:
  Histogram(double lower, double upper, std::size_t bins);

  void add(double x);
  void add(std::span<const double> xs);
  std::size_t bins() const { return counts_.size(); }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  std::size_t total() const { return total_; }
  std::vector<double> probabilities() const;

 private:
  double lower_;
  double upper_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

/// Bin masses of a distribution given its CDF, edge bins absorbing the tails.
std::vector<double> bin_probabilities(const std::function<double(double)>& cdf, double lower,
                                      double upper, std::size_t bins);

/// Half the L1 distance between two probability vectors.
double histogram_tv(std::span<const double> p, std::span<const double> q);

/// Expected histogram TV from Monte-Carlo noise alone:
/// 1/2 sum_b sqrt(2/pi) sqrt(p_b (1 - p_b) / ess). A second ess adds the
/// noise of a second independent histogram.
double mc_error_floor(std::span<const double> p, double ess,
                      double second_ess = std::numeric_limits<double>::infinity());

}  // namespace sublab::diagnostics

#endif  // SUBLAB_DIAGNOSTICS_ESTIMATORS_HPP_
