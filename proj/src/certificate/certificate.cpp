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

#include "sublab/certificate/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sublab/core/parallel.hpp"
#include "sublab/diagnostics/covering.hpp"

namespace sublab::certificate {
namespace {

Eigen::VectorXd to_vec(const Eigen::RowVectorXd& r) { return r.transpose(); }

std::vector<double> std_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::size_t pair_count(std::size_t d) { return d * (d + 1) / 2; }

Eigen::VectorXd coefficient_vector(const models::GlmFamily& family, const Eigen::VectorXd& beta,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& xi) {
  const Eigen::Index d = beta.size();
  if (x.size() != d || xi.size() != d) {
    throw std::invalid_argument("coefficient_vector: x, xi and beta must have equal length");
  }
  const double zeta = x.dot(beta);
  const double s = xi.dot(beta);
  const double alpha = beta.sum();
  const double disp = family.dispersion();
  const double f0 = -family.c2(zeta) / disp;
  const double f1 = -family.c3(zeta) / disp;
  const double f2 = -family.c4(zeta) / disp;
  Eigen::VectorXd out(static_cast<Eigen::Index>(pair_count(static_cast<std::size_t>(d))));
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j; k < d; ++k) {
      out[p++] = (xi[j] + xi[k]) * f0 + (x[j] + x[k]) * f1 * s +
                 alpha * ((xi[j] * x[k] + x[j] * xi[k]) * f1 + x[j] * x[k] * f2 * s);
    }
  }
  return out;
}

std::string to_string(Verdict v) { return v == Verdict::kPass ? "PASS" : "INCONCLUSIVE"; }

std::size_t numerical_rank(const Eigen::VectorXd& sv, double rel) {
  if (sv.size() == 0) return 0;
  const double top = sv.maxCoeff();
  if (!(top > 0)) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv[i] > rel * top;
  return r;
}

Eigen::MatrixXd CertificateResult::coefficient_matrix() const {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(probes.size()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < probes.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) = probes[i].coefficients.transpose();
  }
  return a;
}

CertificateResult certify(const models::GlmFamily& family, const Eigen::VectorXd& beta,
                          std::size_t max_probes, const RngStream& stream,
                          std::optional<models::CovariateLaw> box) {
  const auto d = static_cast<std::size_t>(beta.size());
  if (d == 0) throw std::invalid_argument("certify: beta is empty");
  CertificateResult res;
  res.m = pair_count(d);
  if (max_probes < res.m + 1) {
    throw std::invalid_argument("certify: max_probes must be at least m + 1 = " +
                                std::to_string(res.m + 1));
  }
  const models::CovariateLaw law = box.value_or(models::CovariateLaw::unit_box(d));
  if (law.dim() != d) throw std::invalid_argument("certify: box dimension differs from beta");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
  for (std::size_t p = 0; p < max_probes; ++p) {
    RngStream s = stream.child(p);
    Probe probe;
    models::CovariateLaw uniform = law;
    uniform.kind = models::CovariateLaw::Kind::kUniformBox;
    probe.x = to_vec(uniform.sample(s));
    probe.xi.resize(static_cast<Eigen::Index>(d));
    do {
      for (Eigen::Index j = 0; j < probe.xi.size(); ++j) probe.xi[j] = s.normal();
    } while (probe.xi.norm() == 0.0);
    probe.xi /= probe.xi.norm();
    probe.coefficients = coefficient_vector(family, beta, probe.x, probe.xi);
    res.probes.push_back(std::move(probe));

    svd.compute(res.coefficient_matrix(), Eigen::ComputeFullV);
    res.singular_values = svd.singularValues();
    res.rank = numerical_rank(res.singular_values);
    if (res.rank == res.m) {
      res.verdict = Verdict::kPass;
      return res;
    }
  }
  // Right singular vectors past the rank span the common null space.
  const Eigen::MatrixXd& v = svd.matrixV();
  for (Eigen::Index c = static_cast<Eigen::Index>(res.rank); c < v.cols(); ++c) {
    res.annihilators.push_back(v.col(c));
  }
  if (res.annihilators.size() == 1) {
    Eigen::VectorXd& a = res.annihilators.front();
    const double scale = a.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (std::abs(a[i]) > 1e-8 * scale) {
        a /= a[i];
        break;
      }
    }
  }
  res.verdict = Verdict::kInconclusive;
  return res;
}

nlohmann::json CertificateResult::to_json() const {
  nlohmann::json j;
  j["verdict"] = to_string(verdict);
  j["m"] = m;
  j["rank"] = rank;
  j["singular_values"] = std_vec(singular_values);
  j["probes"] = nlohmann::json::array();
  for (const auto& p : probes) {
    j["probes"].push_back({{"x", std_vec(p.x)}, {"xi", std_vec(p.xi)},
                           {"coefficients", std_vec(p.coefficients)}});
  }
  j["annihilators"] = nlohmann::json::array();
  for (const auto& a : annihilators) j["annihilators"].push_back(std_vec(a));
  return j;
}

MonitorResult min_singular_monitor(const models::GlmModel& model, const Eigen::VectorXd& beta,
                                   std::size_t n, const models::CovariateLaw& gamma,
                                   std::size_t replicates, const RngStream& stream,
                                   unsigned threads) {
  if (replicates == 0) throw std::invalid_argument("min_singular_monitor: replicates must be positive");
  struct Rep {
    double smin = 0.0;
    bool singular = false;
  };
  const auto reps = parallel_map(replicates, threads, [&](std::size_t r) {
    RngStream s = stream.child(r);
    const Dataset data = models::sample_dataset(model.family, beta, gamma, n, s);
    const Eigen::VectorXd sv =
        Eigen::JacobiSVD<Eigen::MatrixXd>(models::mle_jacobian(model, data, beta)).singularValues();
    Rep out;
    out.smin = sv.size() ? sv.minCoeff() : 0.0;
    out.singular = !(out.smin > 1e-10 * (sv.size() ? sv.maxCoeff() : 0.0));
    return out;
  });
  MonitorResult res;
  res.n = n;
  for (const auto& r : reps) {
    res.sigma_min.push_back(r.smin);
    res.singular = res.singular || r.singular;
  }
  std::sort(res.sigma_min.begin(), res.sigma_min.end());
  res.q01 = diagnostics::empirical_quantile(res.sigma_min, 0.01);
  res.q50 = diagnostics::empirical_quantile(res.sigma_min, 0.5);
  return res;
}

nlohmann::json MonitorResult::to_json() const {
  return {{"n", n}, {"q01", q01}, {"q50", q50}, {"singular", singular},
          {"replicates", sigma_min.size()}};
}

MonitorSweep min_singular_sweep(const models::GlmModel& model, const Eigen::VectorXd& beta,
                                const std::vector<std::size_t>& ns,
                                const models::CovariateLaw& gamma, std::size_t replicates,
                                const RngStream& stream, unsigned threads) {
  MonitorSweep sweep;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sweep.rows.push_back(min_singular_monitor(model, beta, ns[i], gamma, replicates,
                                              stream.child(i), threads));
    const double scaled = sweep.rows.back().q01 / static_cast<double>(ns[i]);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    sweep.flagged = sweep.flagged || sweep.rows.back().singular;
  }
  if (!ns.empty()) sweep.spread = lo > 0 ? hi / lo : INFINITY;
  sweep.flagged = sweep.flagged || sweep.spread > 2.0;
  return sweep;
}

nlohmann::json MonitorSweep::to_json() const {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(r.to_json());
  j["spread"] = spread;
  j["flagged"] = flagged;
  return j;
}

}  // namespace sublab::certificate
