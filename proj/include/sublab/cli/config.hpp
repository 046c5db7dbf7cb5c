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

#ifndef SUBLAB_CLI_CONFIG_HPP_
#define SUBLAB_CLI_CONFIG_HPP_

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sublab/core/rng.hpp"
#include "sublab/cvars/control_variates.hpp"
#include "sublab/kernels/firefly.hpp"
#include "sublab/kernels/subsampling.hpp"
#include "sublab/kernels/target.hpp"
#include "sublab/manifold/manifold.hpp"
#include "sublab/models/glm.hpp"
#include "sublab/models/sampling.hpp"
#include "sublab/models/toy.hpp"

namespace sublab::cli {

/// Invalid configuration; `path` is the dotted location of the bad field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message);
  std::string path;
};

/// Read-only view of a JSON node that knows its own path.
class Field {
 public:
  Field(const nlohmann::json& node, std::string path) : node_(&node), path_(std::move(path)) {}

  const nlohmann::json& raw() const { return *node_; }
  const std::string& path() const { return path_; }
  bool has(const std::string& key) const;
  /// Throws ConfigError naming the missing field.
  Field at(const std::string& key) const;
  Field at(std::size_t index) const;
  std::size_t size() const;
  /// Rejects keys outside `allowed`.
  void only(std::initializer_list<const char*> allowed) const;
  void require_object() const;

  double number() const;
  std::uint64_t count() const;
  bool boolean() const;
  std::string text() const;
  std::vector<double> numbers() const;
  std::vector<std::size_t> counts() const;

  double number(const std::string& key, double fallback) const;
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;

  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::string child_path(const std::string& key) const;
  const nlohmann::json* node_;
  std::string path_;
};

struct ModelSpec {
  enum class Kind { kGlm, kToy } kind = Kind::kGlm;
  models::GlmModel glm;
  Eigen::VectorXd beta0 = Eigen::VectorXd::Ones(1);
  models::CovariateLaw gamma = models::CovariateLaw::unit_box(1);
  models::ToyModel toy;

  bool is_glm() const { return kind == Kind::kGlm; }
};

ModelSpec parse_model(const Field& f);
models::ToyVariant parse_toy_variant(const Field& f);

struct KernelSpec {
  enum class Type { kFullMh, kGeneric, kInformed, kPermutation, kFirefly } type = Type::kFullMh;
  kernels::GenericConfig generic;
  kernels::FireflyConfig firefly;
  double bound_a = 1.0;
  /// Explicit informed weights; empty with random_weights false means uniform.
  std::vector<double> weights;
  bool random_weights = false;
};

/// `n` is the dataset size the kernel will run on, checked against weights.
KernelSpec parse_kernel(const Field& f, const ModelSpec& model, std::size_t n);

manifold::ManifoldConfig parse_manifold(const Field& f);
cvars::CvKind parse_cv_kind(const Field& f);

/// Data, target, a starting point and a kernel for one chain.
struct Problem {
  Dataset data;
  std::unique_ptr<kernels::Target> target;
  Eigen::VectorXd theta0;
};

/// Draws the dataset; GLM starts at the MLE, toy models at the posterior mean.
Problem make_problem(const ModelSpec& model, std::size_t n, RngStream& stream);

/// `stream` feeds random informed weights and the permutation wrapper.
std::unique_ptr<kernels::Kernel> make_kernel(const KernelSpec& spec, const Problem& problem,
                                             const RngStream& stream);

}  // namespace sublab::cli

#endif  // SUBLAB_CLI_CONFIG_HPP_
