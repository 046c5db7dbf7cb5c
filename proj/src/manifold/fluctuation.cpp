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

#include "sublab/manifold/fluctuation.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sublab/core/parallel.hpp"
#include "sublab/diagnostics/covering.hpp"
#include "sublab/diagnostics/tv.hpp"
#include "sublab/models/mle.hpp"

namespace sublab::manifold {
namespace {

struct Draw {
  Dataset z1;
  cvars::ControlVariateSet cv;
  models::CovariateLaw gamma;
};

cvars::ControlVariateSet build_cv(const FluctuationConfig& c, const Dataset& z) {
  cvars::ControlVariateSet smooth = c.model_kind == FluctuationConfig::ModelKind::kToy
                                        ? cvars::toy_mle_cv(c.toy, z)
                                        : cvars::mle_cv(c.glm, z);
  switch (c.cv_kind) {
    case cvars::CvKind::kMle: return smooth;
    case cvars::CvKind::kGrid: return cvars::grid_cv(z, c.grid_exponent);
    case cvars::CvKind::kComposite: return cvars::composite({smooth, cvars::grid_cv(z, c.grid_exponent)});
  }
  return smooth;
}

Draw draw(const FluctuationConfig& c, RngStream& s) {
  Draw out;
  if (c.model_kind == FluctuationConfig::ModelKind::kToy) {
    out.z1 = models::sample_toy_dataset(c.toy, c.n, s);
    const double lo = out.z1.covariates.col(0).minCoeff() - 1.0;
    const double hi = out.z1.covariates.col(0).maxCoeff() + 1.0;
    out.gamma = models::CovariateLaw::box({lo}, {hi});
  } else {
    out.z1 = models::sample_dataset(c.glm.family, c.beta0, c.gamma, c.n, s);
    out.gamma = c.gamma;
  }
  out.cv = build_cv(c, out.z1);
  return out;
}

double log_post(const FluctuationConfig& c, const Dataset& z, const Eigen::VectorXd& theta) {
  if (c.model_kind == FluctuationConfig::ModelKind::kToy) {
    return models::toy_log_posterior(c.toy, z, theta[0]);
  }
  return models::log_posterior(c.glm, z, theta);
}

// Box of +-15 posterior sd around the posterior mode of z.
diagnostics::QuadratureBox posterior_box(const FluctuationConfig& c, const Dataset& z,
                                         double tolerance) {
  diagnostics::QuadratureBox box;
  box.tolerance = tolerance;
  if (c.model_kind == FluctuationConfig::ModelKind::kToy) {
    const auto post = models::toy_posterior(c.toy, z);
    const double lo = post.kind == models::ToyPosterior::Kind::kExponential ? 0.0 : post.mean - 15 * post.sd();
    box.lower = {lo};
    box.upper = {post.mean + 15 * post.sd()};
    return box;
  }
  if (z.d() > 2) throw std::invalid_argument("fluctuation: posterior TV needs d <= 2");
  Eigen::VectorXd mode = models::mle_or_throw(c.glm, z);
  // A few Newton steps from the MLE to the posterior mode.
  for (int it = 0; it < 20; ++it) {
    const Eigen::MatrixXd h = models::hessian_log_posterior(c.glm, z, mode);
    const Eigen::VectorXd step = h.ldlt().solve(models::grad_log_posterior(c.glm, z, mode));
    mode -= step;
    if (step.norm() < 1e-12) break;
  }
  const Eigen::MatrixXd cov = (-models::hessian_log_posterior(c.glm, z, mode)).inverse();
  for (Eigen::Index j = 0; j < mode.size(); ++j) {
    const double sd = std::sqrt(cov(j, j));
    box.lower.push_back(mode[j] - 15 * sd);
    box.upper.push_back(mode[j] + 15 * sd);
  }
  if (box.lower.size() == 2) box.initial_panels = 32;
  return box;
}

FluctuationRow run_replicate(const FluctuationConfig& c, std::size_t r, const RngStream& stream) {
  FluctuationRow row;
  row.replicate = r;
  const RngStream rep = stream.child(r);
  std::optional<Draw> d;
  std::string last_error;
  for (std::size_t a = 0; a < c.max_resamples && !d; ++a) {
    RngStream s = rep.child(0).child(a);
    try {
      d = draw(c, s);
    } catch (const std::runtime_error& e) {
      last_error = e.what();
    }
  }
  if (!d) {
    row.error = "no usable dataset after resampling: " + last_error;
    return row;
  }
  try {
    const Coupling cp = couple_datasets(d->z1, d->cv, d->gamma, c.prefix, c.walk_steps, rep.child(1),
                                        c.manifold);
    row.acceptance = cp.proposed ? static_cast<double>(cp.accepted) / static_cast<double>(cp.proposed) : 0.0;
    row.residual = cp.residual;
    row.prefix_hash = prefix_hash(cp.z2, c.prefix);
    row.prefix_preserved = row.prefix_hash == prefix_hash(d->z1, c.prefix);
    const diagnostics::QuadratureBox box = posterior_box(c, d->z1, c.tv_tolerance);
    row.tv = diagnostics::tv_distance(
        [&](const Eigen::VectorXd& th) { return log_post(c, d->z1, th); },
        [&](const Eigen::VectorXd& th) { return log_post(c, cp.z2, th); }, box);
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<double> FluctuationResult::tvs() const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.ok) out.push_back(r.tv);
  }
  return out;
}

double FluctuationResult::quantile(double q) const {
  return diagnostics::empirical_quantile(tvs(), q);
}

FluctuationResult fluctuation_experiment(const FluctuationConfig& config, const RngStream& stream) {
  if (config.n == 0 || config.prefix > config.n) {
    throw std::invalid_argument("fluctuation: need 0 <= m <= n and n > 0");
  }
  FluctuationResult out;
  out.rows = parallel_map(config.replicates, config.threads,
                          [&](std::size_t r) { return run_replicate(config, r, stream); });
  for (const auto& r : out.rows) out.failures += r.ok ? 0 : 1;
  return out;
}

void write_fluctuation_csv(std::ostream& out, const FluctuationResult& result) {
  out << "replicate,tv,acceptance,residual,prefix_hash,status\n";
  for (const auto& r : result.rows) {
    if (r.ok) {
      fmt::print(out, "{},{:.10g},{:.6g},{:.3g},{:016x},ok\n", r.replicate, r.tv, r.acceptance,
                 r.residual, r.prefix_hash);
    } else {
      std::string msg = r.error;
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      fmt::print(out, "{},,,,,failed: {}\n", r.replicate, msg);
    }
  }
}

}  // namespace sublab::manifold
