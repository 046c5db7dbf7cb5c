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

#include "sublab/models/sampling.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sublab::models {
namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Sequential inversion; counts stay moderate on a compact covariate box.
double sample_poisson(double lambda, RngStream& stream) {
  if (lambda > 500.0) {
    // Normal approximation with continuity correction for very large means.
    const double v = std::floor(lambda + std::sqrt(lambda) * stream.normal() + 0.5);
    return std::max(0.0, v);
  }
  const double u = stream.uniform();
  double k = 0.0;
  double p = std::exp(-lambda);
  double cdf = p;
  while (u > cdf && k < 10.0 * lambda + 100.0) {
    k += 1.0;
    p *= lambda / k;
    cdf += p;
  }
  return k;
}

}  // namespace

CovariateLaw CovariateLaw::unit_box(std::size_t d) {
  return box(std::vector<double>(d, -1.0), std::vector<double>(d, 1.0));
}

CovariateLaw CovariateLaw::box(std::vector<double> lo, std::vector<double> hi) {
  CovariateLaw law;
  law.lower = std::move(lo);
  law.upper = std::move(hi);
  law.validate();
  return law;
}

void CovariateLaw::validate() const {
  if (lower.size() != upper.size() || lower.empty()) {
    throw std::invalid_argument("covariate law: lower/upper bounds must be nonempty and equal length");
  }
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!(lower[j] <= upper[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
      throw std::invalid_argument("covariate law: bound " + std::to_string(j) + " is not a bounded interval");
    }
  }
  if (kind == Kind::kTruncatedGaussian && !(gaussian_sd > 0)) {
    throw std::invalid_argument("covariate law: truncated Gaussian needs sd > 0");
  }
}

bool CovariateLaw::contains(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  for (std::size_t j = 0; j < lower.size(); ++j) {
    const double v = x[static_cast<Eigen::Index>(j)];
    if (v < lower[j] || v > upper[j]) return false;
  }
  return true;
}

double CovariateLaw::log_density(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  if (!contains(x)) return -std::numeric_limits<double>::infinity();
  if (kind == Kind::kUniformBox) return 0.0;
  return -0.5 * x.squaredNorm() / (gaussian_sd * gaussian_sd);
}

Eigen::RowVectorXd CovariateLaw::sample(RngStream& stream) const {
  const auto d = static_cast<Eigen::Index>(lower.size());
  Eigen::RowVectorXd x(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double lo = lower[static_cast<std::size_t>(j)];
    const double hi = upper[static_cast<std::size_t>(j)];
    if (kind == Kind::kUniformBox || lo == hi) {
      x[j] = stream.uniform(lo, hi);
      continue;
    }
    // Componentwise rejection; the box is compact so the Gaussian keeps
    // positive mass on it.
    double v;
    do {
      v = gaussian_sd * stream.normal();
    } while (v < lo || v > hi);
    x[j] = v;
  }
  return x;
}

double sample_response(const GlmFamily& family, double eta, RngStream& stream) {
  switch (family.kind()) {
    case FamilyKind::kLogistic: return stream.bernoulli(sigmoid(eta)) ? 1.0 : 0.0;
    case FamilyKind::kBinomial: {
      const double p = sigmoid(eta);
      double y = 0.0;
      for (int t = 0; t < family.trials(); ++t) y += stream.bernoulli(p) ? 1.0 : 0.0;
      return y;
    }
    case FamilyKind::kPoisson: return sample_poisson(std::exp(eta), stream);
    case FamilyKind::kGaussianIdentity: return eta + family.sigma() * stream.normal();
  }
  return 0.0;
}

Dataset sample_dataset(const GlmFamily& family, const Eigen::VectorXd& beta0,
                       const CovariateLaw& gamma, std::size_t n, RngStream& stream) {
  gamma.validate();
  if (static_cast<std::size_t>(beta0.size()) != gamma.dim()) {
    throw std::invalid_argument("sample_dataset: beta0 dimension differs from covariate law");
  }
  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd x(rows, beta0.size());
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    x.row(i) = gamma.sample(stream);
    y[i] = sample_response(family, x.row(i).dot(beta0.transpose()), stream);
  }
  return Dataset(std::move(x), std::move(y), beta0);
}

nlohmann::json to_json(const CovariateLaw& gamma) {
  nlohmann::json j;
  j["kind"] = gamma.kind == CovariateLaw::Kind::kUniformBox ? "uniform_box" : "truncated_gaussian";
  j["lower"] = gamma.lower;
  j["upper"] = gamma.upper;
  if (gamma.kind == CovariateLaw::Kind::kTruncatedGaussian) j["sd"] = gamma.gaussian_sd;
  return j;
}

CovariateLaw covariate_law_from_json(const nlohmann::json& j) {
  CovariateLaw law;
  const std::string kind = j.value("kind", "uniform_box");
  if (kind == "uniform_box") {
    law.kind = CovariateLaw::Kind::kUniformBox;
  } else if (kind == "truncated_gaussian") {
    law.kind = CovariateLaw::Kind::kTruncatedGaussian;
    law.gaussian_sd = j.value("sd", 1.0);
  } else {
    throw std::invalid_argument("covariate law: unknown kind '" + kind + "'");
  }
  law.lower = j.at("lower").get<std::vector<double>>();
  law.upper = j.at("upper").get<std::vector<double>>();
  law.validate();
  return law;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.d(); ++j) out << (j ? "," : "") << "x" << (j + 1);
  out << (data.d() ? "," : "") << "y\n";
  for (Eigen::Index i = 0; i < data.covariates.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.covariates.cols(); ++j) {
      fmt::print(out, "{:.17g},", data.covariates(i, j));
    }
    fmt::print(out, "{:.17g}\n", data.responses[i]);
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset csv: missing header");
  std::size_t columns = 1;
  for (char ch : line) columns += ch == ',' ? 1 : 0;
  if (columns < 1) throw std::runtime_error("dataset csv: malformed header");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != columns) {
      throw std::runtime_error("dataset csv: row " + std::to_string(rows.size() + 1) +
                               " has " + std::to_string(row.size()) + " fields, expected " +
                               std::to_string(columns));
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(columns - 1);
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    y[i] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
  }
  return Dataset(std::move(x), std::move(y));
}

nlohmann::json dataset_sidecar(const GlmFamily& family, const Dataset& data,
                               const CovariateLaw& gamma, std::uint64_t seed,
                               std::uint64_t stream_id) {
  nlohmann::json j;
  j["family"] = family.name();
  if (family.kind() == FamilyKind::kBinomial) j["trials"] = family.trials();
  j["n"] = data.n();
  j["d"] = data.d();
  if (data.true_param) {
    j["beta0"] = std::vector<double>(data.true_param->data(),
                                     data.true_param->data() + data.true_param->size());
  }
  j["gamma"] = to_json(gamma);
  j["seed"] = seed;
  j["stream_id"] = stream_id;
  j["control_variates"] = nlohmann::json::object();
  return j;
}

}  // namespace sublab::models
