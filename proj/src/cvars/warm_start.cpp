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

#include "sublab/cvars/warm_start.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sublab::cvars {
namespace {

// Simpson weights 1,4,2,...,4,1 on `panels` panels.
double simpson_weight(int k, int panels) {
  if (k == 0 || k == panels) return 1.0;
  return k % 2 ? 4.0 : 2.0;
}

// log of the integral of exp(f - shift) over the box, by composite Simpson.
double log_integral(const std::function<double(const Eigen::VectorXd&)>& f,
                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int panels,
                    double shift) {
  const Eigen::Index d = lo.size();
  const Eigen::VectorXd h = (hi - lo) / panels;
  double sum = 0.0;
  Eigen::VectorXd x(d);
  if (d == 1) {
    for (int a = 0; a <= panels; ++a) {
      x[0] = lo[0] + a * h[0];
      sum += simpson_weight(a, panels) * std::exp(f(x) - shift);
    }
    return std::log(sum * h[0] / 3.0);
  }
  for (int a = 0; a <= panels; ++a) {
    x[0] = lo[0] + a * h[0];
    for (int b = 0; b <= panels; ++b) {
      x[1] = lo[1] + b * h[1];
      sum += simpson_weight(a, panels) * simpson_weight(b, panels) * std::exp(f(x) - shift);
    }
  }
  return std::log(sum * h[0] * h[1] / 9.0);
}

}  // namespace

WarmStart WarmStart::around(const Eigen::VectorXd& center, std::size_t n, double c_w) {
  if (c_w < 0.5 || c_w > 2.0) throw std::invalid_argument("warm start: c_w must lie in [0.5, 2]");
  WarmStart ws;
  ws.center = center;
  ws.c_w = c_w;
  ws.radius = std::pow(static_cast<double>(n), -c_w);
  return ws;
}

double WarmStart::ball_volume() const {
  const double d = static_cast<double>(center.size());
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(radius, d);
}

double WarmStart::density(const Eigen::VectorXd& x) const {
  return (x - center).norm() <= radius ? 1.0 / ball_volume() : 0.0;
}

Eigen::VectorXd warm_start_sample(const WarmStart& ws, RngStream& stream) {
  const Eigen::Index d = ws.center.size();
  Eigen::VectorXd dir(d);
  double norm = 0.0;
  do {
    for (Eigen::Index j = 0; j < d; ++j) dir[j] = stream.normal();
    norm = dir.norm();
  } while (norm == 0.0);
  const double r = ws.radius * std::pow(stream.uniform(), 1.0 / static_cast<double>(d));
  Eigen::VectorXd x = ws.center + dir * (r / norm);
  // Guard the rounding at r = radius.
  const double dist = (x - ws.center).norm();
  if (dist > ws.radius) x = ws.center + (x - ws.center) * (ws.radius / dist);
  return x;
}

WarmStartRatio warm_start_ratio(const WarmStart& ws,
                                const std::function<double(const Eigen::VectorXd&)>& log_density,
                                const RatioOptions& options) {
  const Eigen::Index d = ws.center.size();
  if (d < 1 || d > 2) throw std::invalid_argument("warm_start_ratio: quadrature supports d <= 2");

  const double peak = log_density(ws.center);
  if (!std::isfinite(peak)) throw std::runtime_error("warm_start_ratio: density is zero at the center");

  // Grow the box until every probed boundary point is far into the tail.
  double half = std::max(ws.radius, 1e-3);
  for (int grow = 0;; ++grow) {
    if (grow > 60) throw std::runtime_error("warm_start_ratio: density tails do not decay");
    bool ok = true;
    const int probes = 16;
    for (int p = 0; p <= probes && ok; ++p) {
      const double s = -1.0 + 2.0 * p / probes;
      for (Eigen::Index axis = 0; axis < d && ok; ++axis) {
        for (double side : {-1.0, 1.0}) {
          Eigen::VectorXd x = ws.center;
          x[axis] += side * half;
          if (d == 2) x[1 - axis] += s * half;
          const double v = log_density(x);
          if (std::isfinite(v) && v > peak - options.tail_drop) ok = false;
        }
      }
    }
    if (ok) break;
    half *= 1.5;
  }
  const Eigen::VectorXd lo = ws.center.array() - half;
  const Eigen::VectorXd hi = ws.center.array() + half;

  int panels = 64;
  double prev = log_integral(log_density, lo, hi, panels, peak);
  double cur = prev;
  int refinements = 0;
  for (;;) {
    if (refinements >= options.max_refinements) {
      throw std::runtime_error("warm_start_ratio: quadrature did not converge; last estimates " +
                               std::to_string(prev) + " and " + std::to_string(cur) +
                               " with " + std::to_string(panels) + " panels per axis");
    }
    panels *= 2;
    ++refinements;
    prev = cur;
    cur = log_integral(log_density, lo, hi, panels, peak);
    if (std::abs(std::expm1(cur - prev)) < options.relative_tolerance) break;
    if (d == 2 && panels >= 4096) {
      throw std::runtime_error("warm_start_ratio: quadrature did not converge; last estimates " +
                               std::to_string(prev) + " and " + std::to_string(cur));
    }
  }
  const double log_z = cur + peak;

  // Supremum of q / p over a lattice covering the ball, boundary included.
  double worst = -std::numeric_limits<double>::infinity();
  const int m = options.sup_nodes;
  Eigen::VectorXd x(d);
  auto visit = [&](const Eigen::VectorXd& pt) {
    if ((pt - ws.center).norm() > ws.radius * (1.0 + 1e-12)) return;
    worst = std::max(worst, log_z - log_density(pt));
  };
  if (d == 1) {
    for (int a = 0; a < m; ++a) {
      x[0] = ws.center[0] - ws.radius + 2.0 * ws.radius * a / (m - 1);
      visit(x);
    }
  } else {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        x[0] = ws.center[0] - ws.radius + 2.0 * ws.radius * a / (m - 1);
        x[1] = ws.center[1] - ws.radius + 2.0 * ws.radius * b / (m - 1);
        visit(x);
      }
    }
    // Points on the circle itself, where the supremum usually sits.
    for (int a = 0; a < 4 * m; ++a) {
      const double ang = 2.0 * std::numbers::pi * a / (4 * m);
      x[0] = ws.center[0] + ws.radius * std::cos(ang);
      x[1] = ws.center[1] + ws.radius * std::sin(ang);
      visit(x);
    }
  }
  WarmStartRatio out;
  out.log_normalizer = log_z;
  out.refinements = refinements;
  out.ratio = std::exp(worst) / ws.ball_volume();
  return out;
}

}  // namespace sublab::cvars
