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

#include "sublab/cli/config.hpp"

#include <cmath>
#include <limits>

#include "sublab/models/mle.hpp"

namespace sublab::cli {

ConfigError::ConfigError(std::string p, const std::string& message)
    : std::invalid_argument(p + ": " + message), path(std::move(p)) {}

std::string Field::child_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

void Field::fail(const std::string& message) const { throw ConfigError(path_.empty() ? "<root>" : path_, message); }

void Field::require_object() const {
  if (!node_->is_object()) fail("expected an object");
}

bool Field::has(const std::string& key) const {
  return node_->is_object() && node_->contains(key) && !(*node_)[key].is_null();
}

Field Field::at(const std::string& key) const {
  require_object();
  if (!has(key)) throw ConfigError(child_path(key), "missing required field");
  return Field((*node_)[key], child_path(key));
}

Field Field::at(std::size_t index) const {
  if (!node_->is_array() || index >= node_->size()) fail("index out of range");
  return Field((*node_)[index], path_ + "[" + std::to_string(index) + "]");
}

std::size_t Field::size() const {
  if (!node_->is_array()) fail("expected an array");
  return node_->size();
}

void Field::only(std::initializer_list<const char*> allowed) const {
  require_object();
  for (const auto& item : node_->items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError(child_path(item.key()), "unknown field");
  }
}

double Field::number() const {
  if (!node_->is_number()) fail("expected a number");
  const double v = node_->get<double>();
  if (!std::isfinite(v)) fail("expected a finite number");
  return v;
}

std::uint64_t Field::count() const {
  if (!node_->is_number_unsigned() && !(node_->is_number_integer() && node_->get<std::int64_t>() >= 0)) {
    fail("expected a non-negative integer");
  }
  return node_->get<std::uint64_t>();
}

bool Field::boolean() const {
  if (!node_->is_boolean()) fail("expected true or false");
  return node_->get<bool>();
}

std::string Field::text() const {
  if (!node_->is_string()) fail("expected a string");
  return node_->get<std::string>();
}

std::vector<double> Field::numbers() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
  return out;
}

std::vector<std::size_t> Field::counts() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).count());
  return out;
}

double Field::number(const std::string& key, double fallback) const {
  return has(key) ? at(key).number() : fallback;
}
std::uint64_t Field::count(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? at(key).count() : fallback;
}
bool Field::boolean(const std::string& key, bool fallback) const {
  return has(key) ? at(key).boolean() : fallback;
}
std::string Field::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? at(key).text() : fallback;
}

models::ToyVariant parse_toy_variant(const Field& f) {
  const std::string v = f.text();
  if (v == "gaussian_hierarchy") return models::ToyVariant::kGaussianHierarchy;
  if (v == "exponential_tail") return models::ToyVariant::kExponentialTail;
  f.fail("unknown toy model '" + v + "' (gaussian_hierarchy, exponential_tail)");
}

ModelSpec parse_model(const Field& f) {
  f.require_object();
  ModelSpec spec;
  if (f.has("toy")) {
    f.only({"toy"});
    spec.kind = ModelSpec::Kind::kToy;
    spec.toy.variant = parse_toy_variant(f.at("toy"));
    return spec;
  }
  f.only({"family", "trials", "prior_sd", "beta0", "gamma"});
  const Field fam = f.at("family");
  const int trials = static_cast<int>(f.count("trials", 1));
  try {
    spec.glm.family = models::family_from_name(fam.text(), trials);
  } catch (const std::invalid_argument& e) {
    fam.fail(e.what());
  }
  if (f.has("prior_sd")) {
    const Field p = f.at("prior_sd");
    if (p.raw().is_string() && p.text() == "flat") {
      spec.glm.prior = models::Prior::flat();
    } else {
      spec.glm.prior.sd = p.number();
      if (!(spec.glm.prior.sd > 0)) p.fail("must be positive or \"flat\"");
    }
  }
  const std::vector<double> beta = f.at("beta0").numbers();
  if (beta.empty()) f.at("beta0").fail("must not be empty");
  spec.beta0 = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  spec.gamma = models::CovariateLaw::unit_box(beta.size());
  if (f.has("gamma")) {
    const Field g = f.at("gamma");
    try {
      spec.gamma = models::covariate_law_from_json(g.raw());
    } catch (const std::exception& e) {
      g.fail(e.what());
    }
    if (spec.gamma.dim() != beta.size()) g.fail("dimension differs from beta0");
  }
  return spec;
}

KernelSpec parse_kernel(const Field& f, const ModelSpec& model, std::size_t n) {
  f.only({"type", "proposal_scale", "batch_size", "delta", "max_batches", "bound_a", "weights",
          "resample_fraction", "bound_scale", "bright_only_usage"});
  KernelSpec spec;
  const Field type = f.at("type");
  const std::string t = type.text();
  if (t == "full_mh") {
    spec.type = KernelSpec::Type::kFullMh;
  } else if (t == "generic") {
    spec.type = KernelSpec::Type::kGeneric;
  } else if (t == "informed") {
    spec.type = KernelSpec::Type::kInformed;
  } else if (t == "permutation") {
    spec.type = KernelSpec::Type::kPermutation;
  } else if (t == "firefly") {
    spec.type = KernelSpec::Type::kFirefly;
  } else {
    type.fail("unknown kernel '" + t + "' (full_mh, generic, informed, permutation, firefly)");
  }
  spec.generic.proposal_scale = f.number("proposal_scale", 1.0);
  spec.generic.batch_size = f.count("batch_size", 10);
  spec.generic.delta = f.number("delta", 1.0);
  spec.generic.max_batches = f.count("max_batches", 1000);
  spec.firefly.proposal_scale = spec.generic.proposal_scale;
  spec.firefly.resample_fraction = f.number("resample_fraction", 0.1);
  spec.firefly.bound_scale = f.number("bound_scale", 1.0);
  spec.firefly.bright_only_usage = f.boolean("bright_only_usage", false);
  spec.bound_a = f.number("bound_a", 1.0);
  try {
    if (spec.type == KernelSpec::Type::kFirefly) {
      spec.firefly.validate();
    } else {
      spec.generic.validate();
    }
  } catch (const std::invalid_argument& e) {
    f.fail(e.what());
  }
  if (!(spec.generic.proposal_scale > 0)) f.at("proposal_scale").fail("must be positive");
  if (spec.type != KernelSpec::Type::kFullMh && spec.type != KernelSpec::Type::kFirefly &&
      spec.generic.batch_size > n) {
    f.at("batch_size").fail("exceeds n = " + std::to_string(n));
  }
  if (spec.type == KernelSpec::Type::kFirefly &&
      (!model.is_glm() || model.glm.family.kind() != models::FamilyKind::kLogistic)) {
    type.fail("firefly requires the logistic family");
  }
  if (spec.type == KernelSpec::Type::kInformed) {
    if (!(spec.bound_a >= 1.0)) f.at("bound_a").fail("must be at least 1");
    if (f.has("weights")) {
      const Field w = f.at("weights");
      if (w.raw().is_string()) {
        if (w.text() != "random") w.fail("expected a list or \"random\"");
        spec.random_weights = true;
      } else {
        spec.weights = w.numbers();
        if (spec.weights.size() != n) w.fail("needs one weight per datum (" + std::to_string(n) + ")");
        for (double x : spec.weights) {
          if (!(x >= 1.0 / spec.bound_a && x <= spec.bound_a)) w.fail("weights must lie in [1/A, A]");
        }
      }
    }
  }
  return spec;
}

manifold::ManifoldConfig parse_manifold(const Field& f) {
  f.only({"step", "trust_radius", "tolerance", "max_newton"});
  manifold::ManifoldConfig c;
  c.step = f.number("step", 0.0);
  c.trust_radius = f.number("trust_radius", 0.0);
  c.tolerance = f.number("tolerance", 1e-10);
  c.max_newton = static_cast<int>(f.count("max_newton", 50));
  if (c.step < 0) f.at("step").fail("must be non-negative");
  if (c.trust_radius < 0) f.at("trust_radius").fail("must be non-negative");
  if (!(c.tolerance > 0)) f.at("tolerance").fail("must be positive");
  return c;
}

cvars::CvKind parse_cv_kind(const Field& f) {
  const std::string v = f.text();
  if (v == "mle") return cvars::CvKind::kMle;
  if (v == "grid") return cvars::CvKind::kGrid;
  if (v == "composite") return cvars::CvKind::kComposite;
  f.fail("unknown control variate '" + v + "' (mle, grid, composite)");
}

Problem make_problem(const ModelSpec& model, std::size_t n, RngStream& stream) {
  Problem p;
  if (model.is_glm()) {
    p.data = models::sample_dataset(model.glm.family, model.beta0, model.gamma, n, stream);
    p.theta0 = models::mle_or_throw(model.glm, p.data);
    p.target = std::make_unique<kernels::GlmTarget>(model.glm, p.data);
  } else {
    p.data = models::sample_toy_dataset(model.toy, n, stream);
    p.theta0 = Eigen::VectorXd::Constant(1, models::toy_posterior(model.toy, p.data).mean);
    p.target = std::make_unique<kernels::ToyTarget>(model.toy, p.data);
  }
  return p;
}

std::unique_ptr<kernels::Kernel> make_kernel(const KernelSpec& spec, const Problem& problem,
                                             const RngStream& stream) {
  switch (spec.type) {
    case KernelSpec::Type::kFullMh:
      return std::make_unique<kernels::FullMh>(spec.generic.proposal_scale);
    case KernelSpec::Type::kGeneric:
      return std::make_unique<kernels::GenericSubsampler>(spec.generic);
    case KernelSpec::Type::kInformed: {
      std::vector<double> w = spec.weights;
      if (w.empty()) {
        w.assign(problem.data.n(), 1.0);
        if (spec.random_weights) {
          RngStream s = stream.child(1);
          const double log_a = std::log(spec.bound_a);
          for (double& x : w) x = std::exp(s.uniform(-log_a, log_a));
        }
      }
      return std::make_unique<kernels::InformedSubsampler>(spec.generic, std::move(w), spec.bound_a);
    }
    case KernelSpec::Type::kPermutation:
      return std::make_unique<kernels::PermutationWrapper>(
          std::make_shared<const kernels::GenericSubsampler>(spec.generic), problem.data.n(),
          stream.child(2));
    case KernelSpec::Type::kFirefly:
      return std::make_unique<kernels::Firefly>(spec.firefly, problem.data, problem.theta0);
  }
  return nullptr;
}

}  // namespace sublab::cli
