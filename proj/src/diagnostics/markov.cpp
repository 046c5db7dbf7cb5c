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

#include "sublab/diagnostics/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "sublab/core/parallel.hpp"

namespace sublab::diagnostics {
namespace {

// Tolerance on |pi_i P_ij - pi_j P_ji| below which the symmetric solver is used.
constexpr double kReversibleTolerance = 1e-11;

std::vector<std::size_t> axis_indices(const Grid& grid, std::size_t cell) {
  std::vector<std::size_t> idx(grid.dim());
  for (std::size_t a = grid.dim(); a-- > 0;) {
    idx[a] = cell % grid.axes[a].cells;
    cell /= grid.axes[a].cells;
  }
  return idx;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi) {
  const Eigen::VectorXd s = pi.cwiseSqrt();
  Eigen::MatrixXd m = s.asDiagonal() * p * s.cwiseInverse().asDiagonal();
  return 0.5 * (m + m.transpose());
}

double gap_from_moduli(std::vector<double> moduli, const std::vector<double>& distance_to_one) {
  if (moduli.size() <= 1) return 1.0;
  const auto one = std::min_element(distance_to_one.begin(), distance_to_one.end()) -
                   distance_to_one.begin();
  moduli.erase(moduli.begin() + one);
  const double top = *std::max_element(moduli.begin(), moduli.end());
  return std::clamp(1.0 - top, 0.0, 1.0);
}

bool reversible_with(const Eigen::MatrixXd& p, Eigen::VectorXd* pi_out) {
  Eigen::VectorXd pi;
  try {
    pi = stationary_distribution(p);
  } catch (const std::runtime_error&) {
    return false;
  }
  if (pi.minCoeff() <= 0.0) return false;
  if (detailed_balance_asymmetry(p, pi) > kReversibleTolerance) return false;
  if (pi_out) *pi_out = pi;
  return true;
}

}  // namespace

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (const auto& a : axes) s *= a.cells;
  return axes.empty() ? 0 : s;
}

void Grid::validate() const {
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("grid: need one or two axes");
  for (const auto& a : axes) {
    if (a.cells == 0 || !(a.upper > a.lower) || !std::isfinite(a.lower) || !std::isfinite(a.upper)) {
      throw std::invalid_argument("grid: each axis needs cells > 0 and lower < upper");
    }
  }
}

Eigen::VectorXd Grid::center(std::size_t cell) const {
  const auto idx = axis_indices(*this, cell);
  Eigen::VectorXd c(static_cast<Eigen::Index>(dim()));
  for (std::size_t a = 0; a < dim(); ++a) {
    c[static_cast<Eigen::Index>(a)] =
        axes[a].lower + (static_cast<double>(idx[a]) + 0.5) * axes[a].width();
  }
  return c;
}

std::size_t Grid::locate(const Eigen::VectorXd& theta) const {
  std::size_t cell = 0;
  for (std::size_t a = 0; a < dim(); ++a) {
    const double pos = (theta[static_cast<Eigen::Index>(a)] - axes[a].lower) / axes[a].width();
    std::size_t i = 0;
    if (pos >= static_cast<double>(axes[a].cells)) {
      i = axes[a].cells - 1;
    } else if (pos > 0.0) {
      i = static_cast<std::size_t>(pos);
    }
    cell = cell * axes[a].cells + i;
  }
  return cell;
}

Eigen::VectorXd Grid::sample_in_cell(std::size_t cell, RngStream& stream) const {
  const auto idx = axis_indices(*this, cell);
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim()));
  for (std::size_t a = 0; a < dim(); ++a) {
    x[static_cast<Eigen::Index>(a)] =
        axes[a].lower + (static_cast<double>(idx[a]) + stream.uniform()) * axes[a].width();
  }
  return x;
}

Grid centered_grid(const Eigen::VectorXd& center, const Eigen::VectorXd& sd, std::size_t cells,
                   double half_span) {
  if (center.size() != sd.size()) throw std::invalid_argument("centered_grid: size mismatch");
  Grid g;
  for (Eigen::Index j = 0; j < center.size(); ++j) {
    g.axes.push_back({center[j] - half_span * sd[j], center[j] + half_span * sd[j], cells});
  }
  g.validate();
  return g;
}

void TransitionMatrix::validate(double tolerance) const {
  if (p.rows() != p.cols() || p.rows() == 0) {
    throw std::invalid_argument("transition matrix: must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (p.row(i).minCoeff() < 0.0) {
      throw std::invalid_argument("transition matrix: negative entry in row " + std::to_string(i));
    }
    const double s = p.row(i).sum();
    if (!(std::abs(s - 1.0) <= tolerance)) {
      throw std::invalid_argument("transition matrix: row " + std::to_string(i) + " sums to " +
                                  std::to_string(s));
    }
  }
}

TransitionMatrix make_transition_matrix(Eigen::MatrixXd p) {
  TransitionMatrix t{std::move(p), {}};
  t.validate();
  return t;
}

TransitionMatrix discretize(const kernels::Kernel& kernel, const kernels::Target& target,
                            const Grid& grid, const DiscretizeOptions& options,
                            const RngStream& stream) {
  grid.validate();
  if (static_cast<std::size_t>(target.dim()) != grid.dim()) {
    throw std::invalid_argument("discretize: grid dimension differs from the target");
  }
  if (options.draws_per_cell < 10000) {
    throw std::invalid_argument("discretize: at least 10^4 draws per cell are required");
  }
  const std::size_t cells = grid.size();
  const double inv = 1.0 / static_cast<double>(options.draws_per_cell);
  auto rows = parallel_map(cells, options.threads, [&](std::size_t c) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(cells));
    const RngStream cell_stream = stream.child(c);
    for (std::size_t r = 0; r < options.draws_per_cell; ++r) {
      const RngStream draw = cell_stream.child(r);
      RngStream start = draw.child(1);
      RngStream aux = draw.child(2);
      RngStream move = draw.child(3);
      const kernels::KernelState s0 =
          kernel.initial_state(grid.sample_in_cell(c, start), target, aux);
      const kernels::StepResult res = kernel.step(s0, target, move);
      if (res.status != kernels::StepStatus::kOk) {
        throw std::runtime_error("discretize: step aborted in cell " + std::to_string(c) + ": " +
                                 res.failure);
      }
      row[static_cast<Eigen::Index>(grid.locate(res.state.theta))] += 1.0;
    }
    return Eigen::RowVectorXd(row * inv);
  });
  TransitionMatrix t;
  t.grid = grid;
  t.p.resize(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(cells));
  for (std::size_t c = 0; c < cells; ++c) {
    Eigen::RowVectorXd& row = rows[c];
    row /= row.sum();
    t.p.row(static_cast<Eigen::Index>(c)) = row;
  }
  t.validate();
  return t;
}

TransitionMatrix metropolis_matrix(const std::function<double(double)>& log_density,
                                   const Grid& grid, double half_width, std::size_t subnodes) {
  grid.validate();
  if (grid.dim() != 1) throw std::invalid_argument("metropolis_matrix: 1-D grids only");
  if (!(half_width > 0.0) || subnodes == 0) {
    throw std::invalid_argument("metropolis_matrix: need half_width > 0 and subnodes > 0");
  }
  const GridAxis& ax = grid.axes.front();
  const std::size_t m = ax.cells * subnodes;
  const double delta = ax.width() / static_cast<double>(subnodes);
  std::vector<double> x(m), lp(m);
  for (std::size_t a = 0; a < m; ++a) {
    x[a] = ax.lower + (static_cast<double>(a) + 0.5) * delta;
    lp[a] = log_density(x[a]);
  }
  const auto cells = static_cast<Eigen::Index>(ax.cells);
  // Sub-node weights inside each cell follow the target, which keeps the
  // lumped chain reversible.
  const double top = *std::max_element(lp.begin(), lp.end());
  if (top == -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("metropolis_matrix: density vanishes on the grid");
  }
  std::vector<double> weight(m);
  for (std::size_t a = 0; a < m; ++a) weight[a] = std::exp(lp[a] - top);
  std::vector<double> cell_mass(ax.cells, 0.0);
  for (std::size_t a = 0; a < m; ++a) cell_mass[a / subnodes] += weight[a];
  for (std::size_t a = 0; a < m; ++a) {
    const double total = cell_mass[a / subnodes];
    // Cells with no mass fall back to equal weights.
    weight[a] = total > 0.0 ? weight[a] / total : 1.0 / static_cast<double>(subnodes);
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(cells, cells);
  const double mass = delta / (2.0 * half_width);
  const auto reach = static_cast<std::size_t>(std::ceil(half_width / delta)) + 1;
  for (std::size_t a = 0; a < m; ++a) {
    const auto i = static_cast<Eigen::Index>(a / subnodes);
    const std::size_t lo = a > reach ? a - reach : 0;
    const std::size_t hi = std::min(m - 1, a + reach);
    for (std::size_t b = lo; b <= hi; ++b) {
      if (b == a || std::abs(x[b] - x[a]) >= half_width) continue;
      double accept;
      if (lp[b] == -std::numeric_limits<double>::infinity()) {
        accept = 0.0;
      } else if (lp[a] == -std::numeric_limits<double>::infinity()) {
        accept = 1.0;
      } else {
        accept = std::min(1.0, std::exp(lp[b] - lp[a]));
      }
      p(i, static_cast<Eigen::Index>(b / subnodes)) += weight[a] * mass * accept;
    }
  }
  for (Eigen::Index i = 0; i < cells; ++i) {
    p(i, i) += 1.0 - p.row(i).sum();
  }
  TransitionMatrix t{std::move(p), grid};
  t.validate(1e-10);
  return t;
}

Eigen::MatrixXd discrete_metropolis(const Eigen::VectorXd& log_pi, const Eigen::MatrixXd& q) {
  const Eigen::Index k = log_pi.size();
  if (q.rows() != k || q.cols() != k) throw std::invalid_argument("discrete_metropolis: size mismatch");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j || q(i, j) <= 0.0) continue;
      const double r = std::exp(log_pi[j] - log_pi[i]) * q(j, i) / q(i, j);
      p(i, j) = q(i, j) * std::min(1.0, r);
    }
    p(i, i) = 1.0 - p.row(i).sum();
  }
  return p;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& p) {
  const Eigen::Index k = p.rows();
  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(k, k);
  a.row(k - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b[k - 1] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw std::runtime_error("stationary distribution is not unique");
  Eigen::VectorXd pi = lu.solve(b);
  if (pi.minCoeff() < -1e-9) throw std::runtime_error("stationary vector has negative mass");
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

double detailed_balance_asymmetry(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi) {
  const Eigen::MatrixXd flow = pi.asDiagonal() * p;
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

double spectral_gap_general(const Eigen::MatrixXd& p) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(p, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral gap: eigensolver did not converge");
  std::vector<double> moduli, dist;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    moduli.push_back(std::abs(es.eigenvalues()[i]));
    dist.push_back(std::abs(es.eigenvalues()[i] - 1.0));
  }
  return gap_from_moduli(std::move(moduli), dist);
}

double spectral_gap_symmetrized(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(p, pi), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral gap: eigensolver did not converge");
  std::vector<double> moduli, dist;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    moduli.push_back(std::abs(es.eigenvalues()[i]));
    dist.push_back(std::abs(es.eigenvalues()[i] - 1.0));
  }
  return gap_from_moduli(std::move(moduli), dist);
}

double spectral_gap(const Eigen::MatrixXd& p) {
  Eigen::VectorXd pi;
  if (reversible_with(p, &pi)) return spectral_gap_symmetrized(p, pi);
  return spectral_gap_general(p);
}

double spectral_gap(const TransitionMatrix& t) {
  t.validate(1e-10);
  return spectral_gap(t.p);
}

Eigen::MatrixXd time_reversal(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi) {
  return pi.cwiseInverse().asDiagonal() * p.transpose() * pi.asDiagonal();
}

PseudoGap pseudo_spectral_gap(const Eigen::MatrixXd& p, std::size_t max_power) {
  if (max_power == 0) throw std::invalid_argument("pseudo gap: max_power must be positive");
  const Eigen::VectorXd pi = stationary_distribution(p);
  if (pi.minCoeff() <= 0.0) throw std::runtime_error("pseudo gap: stationary law has empty states");
  PseudoGap best{-1.0, 1};
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p.rows(), p.cols());
  for (std::size_t s = 1; s <= max_power; ++s) {
    power = power * p;
    const Eigen::MatrixXd r = time_reversal(power, pi) * power;
    const double g = spectral_gap_symmetrized(r, pi) / static_cast<double>(s);
    if (g > best.value) best = {g, s};
  }
  return best;
}

PseudoGap pseudo_spectral_gap(const TransitionMatrix& t, std::size_t max_power) {
  t.validate(1e-10);
  return pseudo_spectral_gap(t.p, max_power);
}

Eigen::MatrixXd half_lazy(const Eigen::MatrixXd& p) {
  return 0.5 * (Eigen::MatrixXd::Identity(p.rows(), p.cols()) + p);
}

double asymptotic_variance(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi,
                           const Eigen::VectorXd& f) {
  const Eigen::Index k = p.rows();
  const Eigen::VectorXd centered = f.array() - pi.dot(f);
  const Eigen::MatrixXd fundamental =
      Eigen::MatrixXd::Identity(k, k) - p + Eigen::VectorXd::Ones(k) * pi.transpose();
  const Eigen::VectorXd z = fundamental.partialPivLu().solve(centered);
  const Eigen::VectorXd weighted = pi.cwiseProduct(centered);
  return 2.0 * weighted.dot(z) - weighted.dot(centered);
}

WorstCaseAsvar worst_case_asvar(const Eigen::MatrixXd& p_in, const AsvarOptions& options) {
  const Eigen::MatrixXd p = options.half_lazy ? half_lazy(p_in) : p_in;
  const Eigen::VectorXd pi = stationary_distribution(p);
  if (pi.minCoeff() <= 0.0 || detailed_balance_asymmetry(p, pi) > 1e-10) {
    throw std::invalid_argument("worst_case_asvar: chain is not reversible");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(p, pi));
  if (es.info() != Eigen::Success) throw std::runtime_error("worst_case_asvar: eigensolver failed");
  const Eigen::VectorXd& mu = es.eigenvalues();
  const Eigen::Index k = mu.size();
  if (mu[0] < -options.negative_tolerance) {
    throw std::domain_error("worst_case_asvar: spectrum has negative eigenvalue " +
                            std::to_string(mu[0]) +
                            "; apply the half-lazy kernel (AsvarOptions::half_lazy)");
  }
  WorstCaseAsvar out;
  if (k == 1) {
    out.gap = 1.0;
    out.from_gap = 1.0;
    out.brute_force = 1.0;
    return out;
  }
  // Ascending order; the top eigenvalue is the constant eigenfunction.
  out.gap = std::clamp(1.0 - std::max(mu[k - 2], std::abs(mu[0])), 0.0, 1.0);
  out.from_gap = out.gap > 0.0 ? 2.0 / out.gap - 1.0 : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd inv_sqrt = pi.cwiseSqrt().cwiseInverse();
  double best = 0.0;
  for (Eigen::Index j = 0; j + 1 < k; ++j) {
    const Eigen::VectorXd f = inv_sqrt.cwiseProduct(es.eigenvectors().col(j));
    const double mean = pi.dot(f);
    const double var = pi.dot(f.cwiseProduct(f)) - mean * mean;
    if (var <= 1e-14) continue;
    best = std::max(best, asymptotic_variance(p, pi, f) / var);
  }
  out.brute_force = best;
  return out;
}

}  // namespace sublab::diagnostics
