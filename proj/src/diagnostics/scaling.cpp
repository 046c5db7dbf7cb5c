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

#include "sublab/diagnostics/scaling.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sublab/core/parallel.hpp"
#include "sublab/diagnostics/estimators.hpp"

namespace sublab::diagnostics {

double cost(double n, double gap, double tau) {
  if (!(gap > 0.0 && gap <= 1.0)) throw std::invalid_argument("cost: gap must lie in (0, 1]");
  if (!(tau >= 1.0)) throw std::invalid_argument("cost: tau must be >= 1");
  return n / (gap * tau);
}

std::pair<double, double> fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog: need >= 2 paired points");
  const auto k = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(k, 2);
  Eigen::VectorXd b(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (!(x[u] > 0.0) || !(y[u] > 0.0)) throw std::invalid_argument("fit_loglog: values must be positive");
    a(i, 0) = std::log(x[u]);
    a(i, 1) = 1.0;
    b[i] = std::log(y[u]);
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  return {coef[0], coef[1]};
}

void refit(ScalingResult& result) {
  std::vector<double> xs, ys;
  result.reliable = true;
  for (const auto& r : result.rows) {
    xs.push_back(static_cast<double>(r.n));
    ys.push_back(r.accesses_per_es);
    result.reliable = result.reliable && r.reliable;
  }
  if (xs.size() >= 2) {
    const auto [slope, intercept] = fit_loglog(xs, ys);
    result.slope = slope;
    result.intercept = intercept;
  }
}

ScalingResult scaling_experiment(std::span<const std::size_t> n_grid,
                                 const std::function<ScalingSetup(std::size_t, RngStream&)>& setup,
                                 const ScalingOptions& options, const RngStream& stream) {
  auto phi = options.phi ? options.phi : [](const Eigen::VectorXd& t) { return t[0]; };
  ScalingResult result;
  result.rows = parallel_map(n_grid.size(), options.threads, [&](std::size_t i) {
    const std::size_t n = n_grid[i];
    const RngStream base = stream.child(i);
    RngStream init = base.child(0);
    ScalingSetup s = setup(n, init);
    kernels::RunOptions burn;
    burn.steps = options.burn_in(n);
    burn.record_states = false;
    kernels::ChainRun warm = kernels::run_chain(*s.kernel, *s.target, s.initial, burn, base.child(1));

    std::vector<double> values;
    const std::size_t steps = options.steps(n);
    values.reserve(steps);
    kernels::RunOptions run;
    run.steps = steps;
    run.record_states = false;
    run.observer = [&](std::size_t t, const kernels::KernelState& st) {
      if (t > 0) values.push_back(phi(st.theta));
    };
    kernels::ChainRun measured =
        kernels::run_chain(*s.kernel, *s.target, warm.final_state, run, base.child(2));
    const IatEstimate est = iat_ess(values);
    ScalingRow row;
    row.n = n;
    row.ess = est.ess;
    row.iat = est.iat;
    row.accesses = measured.trace.ledger.access_count();
    row.accesses_per_es = static_cast<double>(row.accesses) / est.ess;
    row.acceptance = static_cast<double>(measured.accepted) / static_cast<double>(steps);
    row.reliable = est.reliable;
    return row;
  });
  refit(result);
  return result;
}

void write_scaling_csv(std::ostream& out, const ScalingResult& result) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.10g}", *v) : std::string(); };
  out << "n,ESS,accesses,accesses_per_ES,gap,tau,cost\n";
  for (const auto& r : result.rows) {
    fmt::print(out, "{},{:.10g},{},{:.10g},{},{},{}\n", r.n, r.ess, r.accesses, r.accesses_per_es,
               opt(r.gap), opt(r.tau), opt(r.cost));
  }
}

}  // namespace sublab::diagnostics
