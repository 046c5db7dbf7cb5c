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

#include "sublab/diagnostics/tv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sublab::diagnostics {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double simpson_weight(std::size_t i, std::size_t panels) {
  if (i == 0 || i == panels) return 1.0;
  return i % 2 ? 4.0 : 2.0;
}

// TV from log-density values on a grid with (already scaled) weights.
double tv_from_nodes(const std::vector<double>& lp1, const std::vector<double>& lp2,
                     const std::vector<double>& weights) {
  const double s1 = *std::max_element(lp1.begin(), lp1.end());
  const double s2 = *std::max_element(lp2.begin(), lp2.end());
  if (s1 == kNegInf || s2 == kNegInf) {
    throw std::runtime_error("tv_distance: a density vanishes on the whole box");
  }
  double z1 = 0.0, z2 = 0.0;
  for (std::size_t i = 0; i < lp1.size(); ++i) {
    z1 += weights[i] * std::exp(lp1[i] - s1);
    z2 += weights[i] * std::exp(lp2[i] - s2);
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < lp1.size(); ++i) {
    tv += weights[i] * std::abs(std::exp(lp1[i] - s1) / z1 - std::exp(lp2[i] - s2) / z2);
  }
  return 0.5 * tv;
}

TvQuadrature tv_1d(const LogDensity& f1, const LogDensity& f2, const QuadratureBox& box) {
  const double lo = box.lower[0], hi = box.upper[0];
  const std::size_t cap = box.max_panels ? box.max_panels : (std::size_t{1} << 22);
  std::size_t panels = box.initial_panels;
  Eigen::VectorXd x(1);
  auto eval = [&](const LogDensity& f, double at) {
    x[0] = at;
    return f(x);
  };
  std::vector<double> lp1(panels + 1), lp2(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i) {
    const double at = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(panels);
    lp1[i] = eval(f1, at);
    lp2[i] = eval(f2, at);
  }
  auto estimate = [&] {
    const double h = (hi - lo) / static_cast<double>(panels);
    std::vector<double> w(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) w[i] = h / 3.0 * simpson_weight(i, panels);
    return tv_from_nodes(lp1, lp2, w);
  };
  double previous = estimate();
  for (int level = 1;; ++level) {
    if (2 * panels > cap) throw TvNonConvergence(previous, previous);
    const std::size_t next = 2 * panels;
    std::vector<double> n1(next + 1), n2(next + 1);
    for (std::size_t i = 0; i <= next; ++i) {
      if (i % 2 == 0) {
        n1[i] = lp1[i / 2];
        n2[i] = lp2[i / 2];
      } else {
        const double at = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(next);
        n1[i] = eval(f1, at);
        n2[i] = eval(f2, at);
      }
    }
    lp1.swap(n1);
    lp2.swap(n2);
    panels = next;
    const double value = estimate();
    if (level >= 2 && std::abs(value - previous) < box.tolerance) return {value, previous, panels};
    if (2 * panels > cap) throw TvNonConvergence(value, previous);
    previous = value;
  }
}

TvQuadrature tv_2d(const LogDensity& f1, const LogDensity& f2, const QuadratureBox& box) {
  const std::size_t cap = box.max_panels ? box.max_panels : (std::size_t{1} << 11);
  auto estimate = [&](std::size_t panels) {
    const std::size_t m = panels + 1;
    const double hx = (box.upper[0] - box.lower[0]) / static_cast<double>(panels);
    const double hy = (box.upper[1] - box.lower[1]) / static_cast<double>(panels);
    std::vector<double> lp1(m * m), lp2(m * m), w(m * m);
    Eigen::VectorXd x(2);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        x << box.lower[0] + hx * static_cast<double>(i), box.lower[1] + hy * static_cast<double>(j);
        lp1[i * m + j] = f1(x);
        lp2[i * m + j] = f2(x);
        w[i * m + j] = hx * hy / 9.0 * simpson_weight(i, panels) * simpson_weight(j, panels);
      }
    }
    return tv_from_nodes(lp1, lp2, w);
  };
  std::size_t panels = box.initial_panels;
  double previous = estimate(panels);
  for (int level = 1;; ++level) {
    if (2 * panels > cap) throw TvNonConvergence(previous, previous);
    panels *= 2;
    const double value = estimate(panels);
    if (level >= 2 && std::abs(value - previous) < box.tolerance) return {value, previous, panels};
    if (2 * panels > cap) throw TvNonConvergence(value, previous);
    previous = value;
  }
}

}  // namespace

TvNonConvergence::TvNonConvergence(double last_estimate, double previous_estimate)
    : std::runtime_error("tv_distance: refinement did not converge; last estimates " +
                         std::to_string(last_estimate) + " and " + std::to_string(previous_estimate)),
      last(last_estimate),
      previous(previous_estimate) {}

TvQuadrature tv_quadrature(const LogDensity& log_p1, const LogDensity& log_p2,
                           const QuadratureBox& box) {
  const std::size_t d = box.lower.size();
  if (d == 0 || d > 2 || box.upper.size() != d) {
    throw std::invalid_argument("tv_distance: box must be 1-D or 2-D");
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (!(box.upper[j] > box.lower[j])) throw std::invalid_argument("tv_distance: empty box");
  }
  if (box.initial_panels < 2 || box.initial_panels % 2) {
    throw std::invalid_argument("tv_distance: initial panels must be even and >= 2");
  }
  return d == 1 ? tv_1d(log_p1, log_p2, box) : tv_2d(log_p1, log_p2, box);
}

double tv_distance(const LogDensity& log_p1, const LogDensity& log_p2, const QuadratureBox& box) {
  return tv_quadrature(log_p1, log_p2, box).value;
}

double tv_distance(const std::function<double(double)>& log_p1,
                   const std::function<double(double)>& log_p2, double lower, double upper,
                   double tolerance) {
  QuadratureBox box;
  box.lower = {lower};
  box.upper = {upper};
  box.tolerance = tolerance;
  return tv_distance([&](const Eigen::VectorXd& x) { return log_p1(x[0]); },
                     [&](const Eigen::VectorXd& x) { return log_p2(x[0]); }, box);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double tv_normal(double m1, double s1, double m2, double s2) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw std::invalid_argument("tv_normal: sd must be positive");
  auto mass = [](double m, double s, double a, double b) {
    return normal_cdf((b - m) / s) - normal_cdf((a - m) / s);
  };
  std::vector<double> cuts;
  if (s1 == s2) {
    if (m1 == m2) return 0.0;
    cuts.push_back(0.5 * (m1 + m2));
  } else {
    // log p1 - log p2 = a x^2 + b x + c.
    const double a = 0.5 / (s2 * s2) - 0.5 / (s1 * s1);
    const double b = m1 / (s1 * s1) - m2 / (s2 * s2);
    const double c = m2 * m2 / (2.0 * s2 * s2) - m1 * m1 / (2.0 * s1 * s1) + std::log(s2 / s1);
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    const double q = -0.5 * (b + std::copysign(disc, b));
    double r1 = q / a, r2 = c / q;
    if (r1 > r2) std::swap(r1, r2);
    cuts = {r1, r2};
  }
  const double inf = std::numeric_limits<double>::infinity();
  double prev = -inf, tv = 0.0;
  cuts.push_back(inf);
  for (double cut : cuts) {
    tv += std::abs(mass(m1, s1, prev, cut) - mass(m2, s2, prev, cut));
    prev = cut;
  }
  return 0.5 * tv;
}

double tv_exponential(double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw std::invalid_argument("tv_exponential: rates must be positive");
  if (r1 == r2) return 0.0;
  const double x = std::log(r1 / r2) / (r1 - r2);
  return std::abs(std::exp(-r2 * x) - std::exp(-r1 * x));
}

}  // namespace sublab::diagnostics
