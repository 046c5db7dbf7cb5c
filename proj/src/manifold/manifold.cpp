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

#include "sublab/manifold/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sublab/kernels/kernel.hpp"

namespace sublab::manifold {
namespace {

void collect(const cvars::ControlVariateSet& cv, std::vector<const cvars::ControlVariateSet*>& smooth,
             std::vector<const cvars::ControlVariateSet*>& grid) {
  switch (cv.kind) {
    case cvars::CvKind::kMle: smooth.push_back(&cv); break;
    case cvars::CvKind::kGrid: grid.push_back(&cv); break;
    case cvars::CvKind::kComposite:
      for (const auto& p : cv.parts) collect(p, smooth, grid);
      break;
  }
}

std::vector<const cvars::ControlVariateSet*> smooth_parts(const cvars::ControlVariateSet& cv) {
  std::vector<const cvars::ControlVariateSet*> smooth, grid;
  collect(cv, smooth, grid);
  return smooth;
}

std::vector<const cvars::ControlVariateSet*> grid_parts(const cvars::ControlVariateSet& cv) {
  std::vector<const cvars::ControlVariateSet*> smooth, grid;
  collect(cv, smooth, grid);
  return grid;
}

Eigen::VectorXd smooth_target(const cvars::ControlVariateSet& cv) {
  const auto parts = smooth_parts(cv);
  Eigen::Index k = 0;
  for (const auto* p : parts) k += p->values.size();
  Eigen::VectorXd t(k);
  Eigen::Index at = 0;
  for (const auto* p : parts) {
    t.segment(at, p->values.size()) = p->values;
    at += p->values.size();
  }
  return t;
}

// Newton residual for one smooth part, ~ T(data) - t. GLM MLE parts use the
// score at t, -J(t)^-1 score(t), which vanishes exactly when T(data) = t and
// avoids re-solving the MLE at every iterate.
Eigen::VectorXd part_residual(const cvars::ControlVariateSet& p, const Dataset& data) {
  if (!p.model) return p.evaluate(data) - p.values;
  const Eigen::MatrixXd j = models::mle_jacobian(*p.model, data, p.values);
  return -j.ldlt().solve(models::score(*p.model, data, p.values));
}

// Derivative of part_residual over free coordinates, at T = t it equals the
// implicit-function Jacobian of the MLE.
Eigen::MatrixXd part_residual_jacobian(const cvars::ControlVariateSet& p, const Dataset& data,
                                       std::size_t prefix) {
  if (!p.model) return cvars::cv_jacobian(p, data, prefix);
  const models::GlmFamily& fam = p.model->family;
  const Eigen::VectorXd& t = p.values;
  const Eigen::Index d = data.covariates.cols();
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto m = static_cast<Eigen::Index>(prefix);
  const Eigen::MatrixXd jac = models::mle_jacobian(*p.model, data, t);
  const double disp = fam.dispersion();
  Eigen::MatrixXd df(d, d * (n - m));
  for (Eigen::Index i = m; i < n; ++i) {
    const double eta = data.covariates.row(i).dot(t);
    const double resid = data.responses[i] - fam.c1(eta);
    const double curv = fam.c2(eta);
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::VectorXd col = -data.covariates.row(i).transpose() * (curv * t[j]);
      col[j] += resid;
      df.col((i - m) * d + j) = col / disp;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
  if (!lu.isInvertible()) throw std::runtime_error("likelihood Jacobian is singular");
  return -lu.solve(df);
}

Eigen::VectorXd smooth_residual(const cvars::ControlVariateSet& cv, const Dataset& data) {
  const auto parts = smooth_parts(cv);
  std::vector<Eigen::VectorXd> pieces;
  Eigen::Index k = 0;
  for (const auto* p : parts) {
    pieces.push_back(part_residual(*p, data));
    k += pieces.back().size();
  }
  Eigen::VectorXd r(k);
  Eigen::Index at = 0;
  for (const auto& v : pieces) {
    r.segment(at, v.size()) = v;
    at += v.size();
  }
  return r;
}

Eigen::MatrixXd smooth_residual_jacobian(const cvars::ControlVariateSet& cv, const Dataset& data,
                                         std::size_t prefix) {
  const auto parts = smooth_parts(cv);
  const auto cols = static_cast<Eigen::Index>((data.n() - prefix) * data.d());
  Eigen::Index k = 0;
  for (const auto* p : parts) k += p->values.size();
  Eigen::MatrixXd j(k, cols);
  Eigen::Index at = 0;
  for (const auto* p : parts) {
    j.middleRows(at, p->values.size()) = part_residual_jacobian(*p, data, prefix);
    at += p->values.size();
  }
  return j;
}

bool grid_cells_kept(const cvars::ControlVariateSet& cv, const Dataset& data) {
  for (const auto* p : grid_parts(cv)) {
    if (p->evaluate(data) != p->values) return false;
  }
  return true;
}

bool free_rows_in_box(const models::CovariateLaw& gamma, const Dataset& data, std::size_t prefix) {
  for (Eigen::Index i = static_cast<Eigen::Index>(prefix); i < data.covariates.rows(); ++i) {
    if (!gamma.contains(data.covariates.row(i))) return false;
  }
  return true;
}

double free_log_density(const models::CovariateLaw& gamma, const Dataset& data, std::size_t prefix) {
  double s = 0.0;
  for (Eigen::Index i = static_cast<Eigen::Index>(prefix); i < data.covariates.rows(); ++i) {
    s += gamma.log_density(data.covariates.row(i));
  }
  return s;
}

Retraction retract_with(const ManifoldConstraint& mc, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& v, double s, const Eigen::MatrixXd& j0,
                        const ManifoldConfig& config) {
  Retraction out;
  const Eigen::VectorXd start = x + s * v;
  Eigen::VectorXd y = start;
  // Newton on the cheap residual to well below the tolerance, then one exact
  // evaluation of T confirms the contract.
  const double newton_tol = 0.01 * config.tolerance;
  for (int it = 0;; ++it) {
    const Dataset dy = with_free_coordinates(mc.base, mc.prefix, y);
    Eigen::VectorXd r;
    Eigen::MatrixXd jy;
    try {
      r = smooth_residual(mc.cv, dy);
      out.iterations = it;
      if (r.size() == 0 || r.norm() < newton_tol) break;
      if (it == config.max_newton) {
        out.cause = "Newton retraction did not converge in " + std::to_string(config.max_newton) +
                    " iterations";
        return out;
      }
      jy = smooth_residual_jacobian(mc.cv, dy, mc.prefix);
    } catch (const std::runtime_error& e) {
      out.cause = std::string("statistic evaluation failed: ") + e.what();
      return out;
    }
    if (!r.allFinite()) {
      out.cause = "Newton residual is not finite";
      return out;
    }
    const Eigen::MatrixXd m = jy * j0.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) {
      out.cause = "singular Newton system";
      return out;
    }
    y -= j0.transpose() * lu.solve(r);
    if (!y.allFinite()) {
      out.cause = "Newton iterate is not finite";
      return out;
    }
  }
  const Dataset dy = with_free_coordinates(mc.base, mc.prefix, y);
  if (!free_rows_in_box(mc.gamma, dy, mc.prefix)) {
    out.cause = "left covariate box";
    return out;
  }
  if (!grid_cells_kept(mc.cv, dy)) {
    out.cause = "grid statistic changed cell";
    return out;
  }
  const Eigen::VectorXd t = smooth_target(mc.cv);
  if (t.size()) {
    try {
      out.residual = (smooth_values(mc.cv, dy) - t).norm();
    } catch (const std::runtime_error& e) {
      out.cause = std::string("statistic evaluation failed: ") + e.what();
      return out;
    }
    if (!(out.residual < config.tolerance)) {
      out.cause = "residual " + std::to_string(out.residual) + " above tolerance";
      return out;
    }
  }
  out.ok = true;
  out.correction = (y - start).norm();
  out.x = std::move(y);
  return out;
}

}  // namespace

std::size_t ManifoldConstraint::smooth_rows() const {
  return static_cast<std::size_t>(smooth_target(cv).size());
}

void ManifoldConstraint::validate() const {
  const std::size_t n = base.n();
  const std::size_t k = smooth_rows();
  if (prefix + k + 1 > n) {
    throw std::invalid_argument("manifold: prefix m must satisfy m <= n - k - 1");
  }
  gamma.validate();
  if (gamma.dim() != base.d()) throw std::invalid_argument("manifold: covariate law dimension differs from d");
  if (!free_rows_in_box(gamma, base, prefix)) {
    throw std::invalid_argument("manifold: base dataset has free rows outside the covariate box");
  }
  const Eigen::VectorXd t = smooth_target(cv);
  if (t.size() && (smooth_values(cv, base) - t).norm() >= 1e-10) {
    throw std::invalid_argument("manifold: base dataset does not satisfy T = t");
  }
  if (!grid_cells_kept(cv, base)) throw std::invalid_argument("manifold: grid statistic differs on base");
}

Eigen::VectorXd free_coordinates(const Dataset& data, std::size_t prefix) {
  const Eigen::Index d = data.covariates.cols();
  const auto m = static_cast<Eigen::Index>(prefix);
  Eigen::VectorXd x((data.covariates.rows() - m) * d);
  for (Eigen::Index i = m; i < data.covariates.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x[(i - m) * d + j] = data.covariates(i, j);
  }
  return x;
}

Dataset with_free_coordinates(const Dataset& data, std::size_t prefix, const Eigen::VectorXd& x) {
  Dataset out = data;
  const Eigen::Index d = data.covariates.cols();
  const auto m = static_cast<Eigen::Index>(prefix);
  if (x.size() != (data.covariates.rows() - m) * d) {
    throw std::invalid_argument("with_free_coordinates: wrong length");
  }
  for (Eigen::Index i = m; i < data.covariates.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out.covariates(i, j) = x[(i - m) * d + j];
  }
  return out;
}

Eigen::VectorXd smooth_values(const cvars::ControlVariateSet& cv, const Dataset& data) {
  const auto parts = smooth_parts(cv);
  std::vector<Eigen::VectorXd> pieces;
  Eigen::Index k = 0;
  for (const auto* p : parts) {
    pieces.push_back(p->evaluate(data));
    k += pieces.back().size();
  }
  Eigen::VectorXd t(k);
  Eigen::Index at = 0;
  for (const auto& v : pieces) {
    t.segment(at, v.size()) = v;
    at += v.size();
  }
  return t;
}

Eigen::MatrixXd smooth_jacobian(const cvars::ControlVariateSet& cv, const Dataset& data,
                                std::size_t prefix) {
  const auto parts = smooth_parts(cv);
  const auto cols = static_cast<Eigen::Index>((data.n() - prefix) * data.d());
  Eigen::Index k = 0;
  for (const auto* p : parts) k += p->values.size();
  Eigen::MatrixXd j(k, cols);
  Eigen::Index at = 0;
  for (const auto* p : parts) {
    j.middleRows(at, p->values.size()) = cvars::cv_jacobian(*p, data, prefix);
    at += p->values.size();
  }
  return j;
}

Eigen::MatrixXd tangent_basis(const ManifoldConstraint& mc) {
  const Eigen::MatrixXd j = smooth_jacobian(mc.cv, mc.base, mc.prefix);
  const Eigen::Index dim = j.cols(), k = j.rows();
  if (k == 0) return Eigen::MatrixXd::Identity(dim, dim);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() < k || sv[sv.size() - 1] <= 1e-10 * std::max(1.0, sv[0])) {
    Eigen::Index worst = 0;
    if (sv.size() == k) svd.matrixU().col(k - 1).cwiseAbs().maxCoeff(&worst);
    throw std::runtime_error("tangent_basis: Jacobian is rank deficient in statistic T_" +
                             std::to_string(worst + 1));
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(j.transpose());
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  return q.rightCols(dim - k);
}

double ManifoldConfig::resolved_step(const models::CovariateLaw& gamma) const {
  if (step > 0.0) return step;
  double half = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < gamma.dim(); ++j) half = std::min(half, 0.5 * (gamma.upper[j] - gamma.lower[j]));
  return 0.05 * half;
}

double ManifoldConfig::resolved_trust(const models::CovariateLaw& gamma) const {
  return trust_radius > 0.0 ? trust_radius : resolved_step(gamma);
}

Retraction retract(const ManifoldConstraint& mc, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                   double s, const ManifoldConfig& config) {
  if (std::abs(s) > config.resolved_trust(mc.gamma) * (1.0 + 1e-12)) {
    throw std::invalid_argument("retract: step exceeds the trust radius");
  }
  const Dataset dx = with_free_coordinates(mc.base, mc.prefix, x);
  return retract_with(mc, x, v, s, smooth_residual_jacobian(mc.cv, dx, mc.prefix), config);
}

ManifoldStep manifold_mh_step(ManifoldConstraint& mc, RngStream& stream, const ManifoldConfig& config) {
  ManifoldStep out;
  const double scale = config.resolved_step(mc.gamma);
  RngStream proposal = stream.child(kernels::purpose::kProposal);
  RngStream accept = stream.child(kernels::purpose::kAccept);
  const Eigen::VectorXd x = free_coordinates(mc.base, mc.prefix);
  Eigen::MatrixXd j0;
  try {
    j0 = smooth_residual_jacobian(mc.cv, mc.base, mc.prefix);
  } catch (const std::runtime_error& e) {
    out.cause = std::string("Jacobian failed: ") + e.what();
    return out;
  }
  Eigen::VectorXd v(x.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = proposal.normal();
  if (j0.rows() > 0) {
    const Eigen::MatrixXd gram = j0 * j0.transpose();
    v -= j0.transpose() * gram.ldlt().solve(j0 * v);
  }
  const double norm = v.norm();
  if (!(norm > 0.0)) {
    out.cause = "empty tangent space";
    return out;
  }
  v /= norm;
  const double s = proposal.uniform(-scale, scale);
  const Retraction r = retract_with(mc, x, v, s, j0, config);
  if (!r.ok) {
    out.cause = r.cause;
    return out;
  }
  Dataset next = with_free_coordinates(mc.base, mc.prefix, r.x);
  const double log_ratio =
      free_log_density(mc.gamma, next, mc.prefix) - free_log_density(mc.gamma, mc.base, mc.prefix);
  out.residual = r.residual;
  if (log_ratio >= 0.0 || std::log(accept.uniform()) < log_ratio) {
    mc.base = std::move(next);
    out.accepted = true;
  } else {
    out.cause = "rejected by covariate density";
  }
  return out;
}

Coupling couple_datasets(const Dataset& z1, const cvars::ControlVariateSet& cv,
                         const models::CovariateLaw& gamma, std::size_t prefix,
                         std::size_t walk_steps, const RngStream& stream,
                         const ManifoldConfig& config) {
  Coupling out{z1, 0, 0, 0.0};
  ManifoldConstraint mc{z1, prefix, cv, gamma};
  if (prefix + mc.smooth_rows() + 1 > z1.n()) return out;
  mc.validate();
  for (std::size_t t = 1; t <= walk_steps; ++t) {
    RngStream s = stream.child(t);
    const ManifoldStep step = manifold_mh_step(mc, s, config);
    ++out.proposed;
    out.accepted += step.accepted ? 1 : 0;
  }
  const Eigen::VectorXd target = smooth_target(cv);
  out.residual = target.size() ? (smooth_values(cv, mc.base) - target).norm() : 0.0;
  out.z2 = std::move(mc.base);
  return out;
}

std::uint64_t prefix_hash(const Dataset& data, std::size_t m) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m) && i < data.covariates.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.covariates.cols(); ++j) feed(data.covariates(i, j));
  }
  for (Eigen::Index i = 0; i < data.responses.size(); ++i) feed(data.responses[i]);
  return h;
}

}  // namespace sublab::manifold
