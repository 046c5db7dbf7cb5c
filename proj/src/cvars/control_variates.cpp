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

#include "sublab/cvars/control_variates.hpp"

#include <cmath>
#include <stdexcept>

namespace sublab::cvars {
namespace {

double abs_sum(const Dataset& data) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < data.covariates.rows(); ++i) s += std::abs(data.covariates(i, 0));
  return s;
}

Eigen::VectorXd solve_toy_mle(const models::ToyModel& model, const Dataset& data) {
  if (data.n() == 0 || data.d() < 1) throw std::runtime_error("control variate: empty toy dataset");
  const double n = static_cast<double>(data.n());
  if (model.variant == models::ToyVariant::kGaussianHierarchy) {
    return Eigen::VectorXd::Constant(1, data.covariates.col(0).sum() / n);
  }
  const double s = abs_sum(data);
  if (!(s > 0.0)) throw std::runtime_error("control variate: toy MLE needs a nonzero observation");
  return Eigen::VectorXd::Constant(1, n / s);
}

Eigen::MatrixXd toy_jacobian_rows(const models::ToyModel& model, const Dataset& data,
                                  std::size_t m) {
  const auto n = static_cast<Eigen::Index>(data.n());
  const Eigen::Index d = data.covariates.cols();
  const auto m_ = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(1, d * (n - m_));
  const double s = model.variant == models::ToyVariant::kGaussianHierarchy ? 0.0 : abs_sum(data);
  for (Eigen::Index i = m_; i < n; ++i) {
    const double y = data.covariates(i, 0);
    out(0, (i - m_) * d) = model.variant == models::ToyVariant::kGaussianHierarchy
                               ? 1.0 / static_cast<double>(n)
                               : -static_cast<double>(n) * ((y > 0) - (y < 0)) / (s * s);
  }
  return out;
}

Eigen::VectorXd solve_mle(const ControlVariateSet& cv, const Dataset& data) {
  if (cv.toy_model) return solve_toy_mle(*cv.toy_model, data);
  models::MleOptions opts = cv.mle_options;
  if (!opts.initial && cv.values.size() == data.covariates.cols()) opts.initial = cv.values;
  models::MleResult r = models::mle(*cv.model, data, opts);
  if (!r.ok()) {
    // A stale starting point can land in a flat region; retry from zero.
    opts.initial.reset();
    r = models::mle(*cv.model, data, opts);
  }
  if (!r.ok()) {
    throw std::runtime_error("control variate: MLE failed (" + models::to_string(r.status) + ")");
  }
  return r.beta;
}

Eigen::MatrixXd mle_jacobian_rows(const ControlVariateSet& cv, const Dataset& data,
                                  std::size_t m) {
  const models::GlmFamily& fam = cv.model->family;
  const Eigen::VectorXd beta = solve_mle(cv, data);
  const Eigen::Index d = data.covariates.cols();
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto m_ = static_cast<Eigen::Index>(m);
  const Eigen::MatrixXd jac = models::mle_jacobian(*cv.model, data, beta);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
  if (!lu.isInvertible()) {
    throw std::runtime_error("control variate: likelihood Jacobian is singular");
  }
  // df_l/dx_ij = [delta_lj (y_i - c'(eta_i)) - x_il c''(eta_i) beta_j] / disp.
  const double disp = fam.dispersion();
  Eigen::MatrixXd df(d, d * (n - m_));
  for (Eigen::Index i = m_; i < n; ++i) {
    const double eta = data.covariates.row(i).dot(beta);
    const double resid = data.responses[i] - fam.c1(eta);
    const double curv = fam.c2(eta);
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::VectorXd col = -data.covariates.row(i).transpose() * (curv * beta[j]);
      col[j] += resid;
      df.col((i - m_) * d + j) = col / disp;
    }
  }
  return -lu.solve(df);
}

}  // namespace

std::string to_string(CvKind kind) {
  switch (kind) {
    case CvKind::kMle: return "mle";
    case CvKind::kGrid: return "grid";
    case CvKind::kComposite: return "composite";
  }
  return "unknown";
}

double grid_spacing(std::size_t n, double a) {
  if (a < 0) throw std::invalid_argument("grid control variate: exponent a must be >= 0");
  return std::pow(static_cast<double>(n), -a);
}

double grid_round(double x, double spacing) {
  // Compare the neighbouring lattice points directly so values that are
  // exactly k * spacing in floating point map to themselves.
  const double k0 = std::floor(x / spacing);
  double best = k0 - 1.0;
  double best_dist = std::abs(x - best * spacing);
  for (double k : {k0, k0 + 1.0}) {
    const double dist = std::abs(x - k * spacing);
    if (dist < best_dist) {
      best = k;
      best_dist = dist;
    }
  }
  return best * spacing;
}

Eigen::VectorXd ControlVariateSet::evaluate(const Dataset& data) const {
  switch (kind) {
    case CvKind::kMle: return solve_mle(*this, data);
    case CvKind::kGrid: {
      const double h = grid_spacing(data.n(), grid_exponent);
      const Eigen::Index d = data.covariates.cols();
      Eigen::VectorXd t(data.covariates.size());
      for (Eigen::Index i = 0; i < data.covariates.rows(); ++i) {
        for (Eigen::Index j = 0; j < d; ++j) t[i * d + j] = grid_round(data.covariates(i, j), h);
      }
      return t;
    }
    case CvKind::kComposite: {
      std::vector<Eigen::VectorXd> pieces;
      Eigen::Index total = 0;
      for (const auto& p : parts) {
        pieces.push_back(p.evaluate(data));
        total += pieces.back().size();
      }
      Eigen::VectorXd t(total);
      Eigen::Index at = 0;
      for (const auto& v : pieces) {
        t.segment(at, v.size()) = v;
        at += v.size();
      }
      return t;
    }
  }
  return {};
}

ControlVariateSet mle_cv(const models::GlmModel& model, const Dataset& data,
                         const models::MleOptions& options) {
  ControlVariateSet cv;
  cv.kind = CvKind::kMle;
  cv.model = model;
  cv.mle_options = options;
  cv.values = models::mle_or_throw(model, data, options);
  return cv;
}

ControlVariateSet toy_mle_cv(const models::ToyModel& model, const Dataset& data) {
  ControlVariateSet cv;
  cv.kind = CvKind::kMle;
  cv.toy_model = model;
  cv.values = solve_toy_mle(model, data);
  return cv;
}

ControlVariateSet grid_cv(const Dataset& data, double a) {
  ControlVariateSet cv;
  cv.kind = CvKind::kGrid;
  cv.grid_exponent = a;
  grid_spacing(data.n(), a);
  cv.values = cv.evaluate(data);
  return cv;
}

ControlVariateSet composite(std::vector<ControlVariateSet> parts) {
  ControlVariateSet cv;
  cv.kind = CvKind::kComposite;
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.values.size();
  cv.values.resize(total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    cv.values.segment(at, p.values.size()) = p.values;
    at += p.values.size();
  }
  cv.parts = std::move(parts);
  return cv;
}

Eigen::MatrixXd cv_jacobian(const ControlVariateSet& cv, const Dataset& data,
                            std::size_t fixed_prefix) {
  if (fixed_prefix > data.n()) throw std::invalid_argument("cv_jacobian: prefix exceeds n");
  const Eigen::Index cols = static_cast<Eigen::Index>((data.n() - fixed_prefix) * data.d());
  switch (cv.kind) {
    case CvKind::kMle:
      return cv.toy_model ? toy_jacobian_rows(*cv.toy_model, data, fixed_prefix)
                          : mle_jacobian_rows(cv, data, fixed_prefix);
    case CvKind::kGrid: return Eigen::MatrixXd::Zero(cv.values.size(), cols);
    case CvKind::kComposite: {
      Eigen::MatrixXd out(cv.values.size(), cols);
      Eigen::Index at = 0;
      for (const auto& p : cv.parts) {
        out.middleRows(at, p.values.size()) = cv_jacobian(p, data, fixed_prefix);
        at += p.values.size();
      }
      return out;
    }
  }
  return {};
}

bool is_differentiable(const ControlVariateSet& cv) {
  return cv.kind == CvKind::kMle;
}

nlohmann::json to_json(const ControlVariateSet& cv) {
  nlohmann::json j;
  j["kind"] = to_string(cv.kind);
  j["values"] = std::vector<double>(cv.values.data(), cv.values.data() + cv.values.size());
  if (cv.model) j["family"] = cv.model->family.name();
  if (cv.toy_model) {
    j["toy"] = cv.toy_model->variant == models::ToyVariant::kGaussianHierarchy ? "gaussian_hierarchy"
                                                                                : "exponential_tail";
  }
  if (cv.kind == CvKind::kGrid) j["a"] = cv.grid_exponent;
  if (cv.kind == CvKind::kComposite) {
    j["parts"] = nlohmann::json::array();
    for (const auto& p : cv.parts) j["parts"].push_back(to_json(p));
  }
  return j;
}

}  // namespace sublab::cvars
