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

#ifndef SUBLAB_DIAGNOSTICS_MARKOV_HPP_
#define SUBLAB_DIAGNOSTICS_MARKOV_HPP_

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sublab/core/rng.hpp"
#include "sublab/kernels/kernel.hpp"

namespace sublab::diagnostics {

struct GridAxis {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t cells = 1;

  double width() const { return (upper - lower) / static_cast<double>(cells); }
};

/// Equal-width product grid over one or two axes. Cells are numbered row-major,
/// the last axis fastest.
struct Grid {
  std::vector<GridAxis> axes;

  std::size_t dim() const { return axes.size(); }
  std::size_t size() const;
  Eigen::VectorXd center(std::size_t cell) const;
  /// Cell containing theta; points outside the grid go to the nearest edge cell.
  std::size_t locate(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd sample_in_cell(std::size_t cell, RngStream& stream) const;
  void validate() const;
};

/// Grid spanning center +- half_span * sd on each axis.
Grid centered_grid(const Eigen::VectorXd& center, const Eigen::VectorXd& sd, std::size_t cells,
                   double half_span = 6.0);

struct TransitionMatrix {
  Eigen::MatrixXd p;
  Grid grid;

  std::size_t size() const { return static_cast<std::size_t>(p.rows()); }
  /// Throws std::invalid_argument unless square, nonnegative and rows sum to 1.
  void validate(double tolerance = 1e-12) const;
};

TransitionMatrix make_transition_matrix(Eigen::MatrixXd p);

struct DiscretizeOptions {
  std::size_t draws_per_cell = 10000;
  unsigned threads = 1;
};

/// Per-cell Monte Carlo: start uniformly inside cell c, draw the auxiliary
/// state from the kernel, take one step and record the destination cell.
/// Draw r of cell c uses stream.child(c).child(r).
TransitionMatrix discretize(const kernels::Kernel& kernel, const kernels::Target& target,
                            const Grid& grid, const DiscretizeOptions& options,
                            const RngStream& stream);

/// Deterministic discretization of random-walk Metropolis with a uniform
/// proposal of the given half-width on a 1-D grid. Each cell is resolved into
/// `subnodes` midpoints weighted by the target within the cell, so the result
/// is the lumped stationary chain and stays reversible. Proposals leaving the
/// grid count as rejections.
TransitionMatrix metropolis_matrix(const std::function<double(double)>& log_density,
                                   const Grid& grid, double half_width,
                                   std::size_t subnodes = 16);

/// Metropolis-Hastings on a finite state space with proposal matrix q.
Eigen::MatrixXd discrete_metropolis(const Eigen::VectorXd& log_pi, const Eigen::MatrixXd& q);

/// Left eigenvector for eigenvalue 1, normalized to sum 1. Throws
/// std::runtime_error when it is not unique or not a probability vector.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& p);

/// max_ij |pi_i P_ij - pi_j P_ji|.
double detailed_balance_asymmetry(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi);

/// 1 - max |lambda| over the spectrum with one eigenvalue nearest 1 removed.
/// Reversible matrices go through the symmetric similarity transform.
double spectral_gap(const TransitionMatrix& t);
double spectral_gap(const Eigen::MatrixXd& p);
/// Forced paths, exposed for cross-checks.
double spectral_gap_general(const Eigen::MatrixXd& p);
double spectral_gap_symmetrized(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi);

/// Time reversal with respect to pi.
Eigen::MatrixXd time_reversal(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi);

struct PseudoGap {
  double value = 0.0;
  std::size_t best_power = 1;
};

/// max over s <= max_power of gap((P^s)* P^s) / s.
PseudoGap pseudo_spectral_gap(const TransitionMatrix& t, std::size_t max_power = 50);
PseudoGap pseudo_spectral_gap(const Eigen::MatrixXd& p, std::size_t max_power = 50);

/// (I + P) / 2.
Eigen::MatrixXd half_lazy(const Eigen::MatrixXd& p);

struct AsvarOptions {
  /// Replace P by its half-lazy version before computing.
  bool half_lazy = false;
  double negative_tolerance = 1e-12;
};

struct WorstCaseAsvar {
  /// 2 / gap - 1.
  double from_gap = 0.0;
  /// max over eigenfunctions f of sigma^2_f / Var_pi(f), with sigma^2 from the
  /// fundamental matrix.
  double brute_force = 0.0;
  double gap = 0.0;
};

/// Requires a reversible chain with nonnegative spectrum; throws otherwise.
WorstCaseAsvar worst_case_asvar(const Eigen::MatrixXd& p, const AsvarOptions& options = {});

/// sigma^2_f = 2 <f, Z f>_pi - <f, f>_pi for centered f, Z = (I - P + 1 pi^T)^-1.
double asymptotic_variance(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi,
                           const Eigen::VectorXd& f);

}  // namespace sublab::diagnostics

#endif  // SUBLAB_DIAGNOSTICS_MARKOV_HPP_
