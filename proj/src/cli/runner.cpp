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

#include "sublab/cli/runner.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "sublab/certificate/certificate.hpp"
#include "sublab/cli/config.hpp"
#include "sublab/core/parallel.hpp"
#include "sublab/core/trace.hpp"
#include "sublab/diagnostics/anticoncentration.hpp"
#include "sublab/diagnostics/covering.hpp"
#include "sublab/diagnostics/estimators.hpp"
#include "sublab/diagnostics/report.hpp"
#include "sublab/diagnostics/scaling.hpp"
#include "sublab/diagnostics/toy_tv.hpp"
#include "sublab/manifold/fluctuation.hpp"

namespace sublab::cli {
namespace {

std::string g17(double x) { return fmt::format("{:.17g}", x); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Writer {
 public:
  Writer(std::filesystem::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {}

  void csv(const std::string& name, const std::string& body) {
    write(name, "# manifest_hash=" + hash_ + "\n" + body);
  }
  void json(const std::string& name, nlohmann::json j) {
    j["manifest_hash"] = hash_;
    write(name, j.dump(2) + "\n");
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    names_.push_back(name);
  }
  std::filesystem::path dir_;
  std::string hash_;
  std::vector<std::string> names_;
};

struct Context {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Writer* out = nullptr;
};

struct Stats {
  std::size_t replicates = 0;
  std::size_t failures = 0;
  std::vector<std::string> log;
};

using Job = std::function<Stats(Context&)>;

template <class F>
std::string to_text(F&& write) {
  std::ostringstream s;
  write(s);
  return s.str();
}

// ---- simulate --------------------------------------------------------------

Job parse_simulate(const Field& root) {
  root.only({"seed", "description", "model", "n", "kernel", "steps", "chains"});
  const ModelSpec model = parse_model(root.at("model"));
  const std::size_t n = root.at("n").count();
  if (n == 0) root.at("n").fail("must be positive");
  const KernelSpec kernel = parse_kernel(root.at("kernel"), model, n);
  const std::size_t steps = root.at("steps").count();
  const std::size_t chains = root.count("chains", 1);
  if (chains == 0) root.at("chains").fail("must be positive");
  return [=](Context& ctx) {
    const RngStream base(ctx.seed, 0);
    RngStream ds = base.child(0);
    const Problem problem = make_problem(model, n, ds);
    const auto k = make_kernel(kernel, problem, base.child(1));
    ctx.out->csv("dataset.csv", to_text([&](std::ostream& o) { models::write_dataset_csv(o, problem.data); }));
    if (model.is_glm()) {
      ctx.out->json("dataset.json", models::dataset_sidecar(model.glm.family, problem.data, model.gamma, ctx.seed, 0));
    }
    struct ChainOut {
      std::string trace;
      nlohmann::json report;
      std::string error;
    };
    const auto outs = parallel_map(chains, ctx.threads, [&](std::size_t c) {
      ChainOut o;
      const RngStream s = base.child(2).child(c);
      try {
        RngStream init = s.child(0);
        kernels::RunOptions ro;
        ro.steps = steps;
        const auto run = kernels::run_chain(*k, *problem.target,
                                            k->initial_state(problem.theta0, *problem.target, init), ro,
                                            s.child(1));
        o.trace = to_text([&](std::ostream& os) { write_trace_csv(os, run.trace); });
        const auto iat = diagnostics::iat_ess(run.trace, [](const Eigen::VectorXd& t) { return t[0]; });
        diagnostics::DiagnosticsReport rep;
        rep.n = static_cast<double>(n);
        if (std::isfinite(iat.ess)) rep.ess = iat.ess;
        o.report = {{"chain", c},
                    {"diagnostics", rep.to_json()},
                    {"acceptance", run.trace.acceptance_rate()},
                    {"accesses", run.trace.ledger.access_count()},
                    {"iat", std::isfinite(iat.iat) ? nlohmann::json(iat.iat) : nlohmann::json()},
                    {"iat_reliable", iat.reliable}};
      } catch (const std::exception& e) {
        o.error = e.what();
      }
      return o;
    });
    Stats st;
    nlohmann::json reports = nlohmann::json::array();
    for (std::size_t c = 0; c < outs.size(); ++c) {
      ++st.replicates;
      if (!outs[c].error.empty()) {
        ++st.failures;
        st.log.push_back(fmt::format("chain {}: {}", c, outs[c].error));
        continue;
      }
      ctx.out->csv(fmt::format("trace_{}.csv", c), outs[c].trace);
      reports.push_back(outs[c].report);
    }
    ctx.out->json("report.json", {{"kernel", k->config_json()}, {"chains", reports}});
    return st;
  };
}

// ---- fluctuation -----------------------------------------------------------

Job parse_fluctuation(const Field& root) {
  root.only({"seed", "description", "model", "n", "m", "cv", "replicates", "walk_steps",
             "manifold", "tv_tolerance", "max_resamples"});
  manifold::FluctuationConfig fc;
  const ModelSpec model = parse_model(root.at("model"));
  if (model.is_glm()) {
    fc.glm = model.glm;
    fc.beta0 = model.beta0;
    fc.gamma = model.gamma;
  } else {
    fc.model_kind = manifold::FluctuationConfig::ModelKind::kToy;
    fc.toy = model.toy;
  }
  fc.n = root.at("n").count();
  fc.prefix = root.at("m").count();
  if (fc.n == 0) root.at("n").fail("must be positive");
  if (fc.prefix > fc.n) root.at("m").fail("exceeds n");
  if (root.has("cv")) {
    const Field cv = root.at("cv");
    cv.only({"type", "grid_exponent"});
    fc.cv_kind = parse_cv_kind(cv.at("type"));
    fc.grid_exponent = cv.number("grid_exponent", 0.0);
    if (!model.is_glm() && fc.cv_kind != cvars::CvKind::kMle) cv.at("type").fail("toy models support only mle");
  }
  fc.replicates = root.count("replicates", 100);
  fc.walk_steps = root.count("walk_steps", 1000);
  if (root.has("manifold")) fc.manifold = parse_manifold(root.at("manifold"));
  fc.tv_tolerance = root.number("tv_tolerance", 1e-6);
  fc.max_resamples = root.count("max_resamples", 20);
  return [=](Context& ctx) mutable {
    fc.threads = ctx.threads;
    const auto res = manifold::fluctuation_experiment(fc, RngStream(ctx.seed, 0));
    ctx.out->csv("fluctuation.csv", to_text([&](std::ostream& o) { manifold::write_fluctuation_csv(o, res); }));
    Stats st;
    st.replicates = res.rows.size();
    st.failures = res.failures;
    for (const auto& r : res.rows) {
      if (!r.ok) st.log.push_back(fmt::format("replicate {}: {}", r.replicate, r.error));
    }
    nlohmann::json summary = {{"replicates", res.rows.size()}, {"failures", res.failures}};
    if (res.failures < res.rows.size()) {
      for (double q : {0.05, 0.5, 0.95, 1.0}) summary[fmt::format("q{:g}", q)] = res.quantile(q);
    }
    ctx.out->json("summary.json", summary);
    return st;
  };
}

// ---- certificate -----------------------------------------------------------

Job parse_certificate(const Field& root) {
  root.only({"seed", "description", "family", "trials", "beta", "max_probes", "box", "monitor"});
  models::GlmFamily family = models::GlmFamily::logistic();
  try {
    family = models::family_from_name(root.at("family").text(), static_cast<int>(root.count("trials", 1)));
  } catch (const std::invalid_argument& e) {
    root.at("family").fail(e.what());
  }
  const std::vector<double> b = root.at("beta").numbers();
  if (b.empty()) root.at("beta").fail("must not be empty");
  const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  const std::size_t m = certificate::pair_count(b.size());
  const std::size_t max_probes = root.count("max_probes", 2 * (m + 1));
  if (max_probes < m + 1) root.at("max_probes").fail("must be at least m + 1 = " + std::to_string(m + 1));
  std::optional<models::CovariateLaw> box;
  if (root.has("box")) {
    try {
      box = models::covariate_law_from_json(root.at("box").raw());
    } catch (const std::exception& e) {
      root.at("box").fail(e.what());
    }
    if (box->dim() != b.size()) root.at("box").fail("dimension differs from beta");
  }
  std::vector<std::size_t> ns;
  std::size_t monitor_reps = 0;
  if (root.has("monitor")) {
    const Field mon = root.at("monitor");
    mon.only({"ns", "replicates"});
    ns = mon.at("ns").counts();
    monitor_reps = mon.count("replicates", 200);
    if (monitor_reps == 0) mon.at("replicates").fail("must be positive");
  }
  return [=](Context& ctx) {
    const auto cert = certificate::certify(family, beta, max_probes, RngStream(ctx.seed, 0), box);
    ctx.out->json("certificate.json", cert.to_json());
    if (!ns.empty()) {
      models::GlmModel model{family, {}};
      const auto sweep = certificate::min_singular_sweep(
          model, beta, ns, box.value_or(models::CovariateLaw::unit_box(b.size())), monitor_reps,
          RngStream(ctx.seed, 1), ctx.threads);
      ctx.out->json("monitor.json", sweep.to_json());
    }
    return Stats{};
  };
}

// ---- covering --------------------------------------------------------------

Job parse_covering(const Field& root) {
  root.only({"seed", "description", "model", "n", "kernel", "quantile", "replicates", "max_steps", "threshold"});
  const ModelSpec model = parse_model(root.at("model"));
  const std::size_t n = root.at("n").count();
  if (n < 2) root.at("n").fail("must be at least 2");
  const KernelSpec kernel = parse_kernel(root.at("kernel"), model, n);
  diagnostics::CoveringOptions opt;
  opt.quantile = root.number("quantile", 0.99);
  if (!(opt.quantile > 0 && opt.quantile <= 1)) root.at("quantile").fail("must lie in (0, 1]");
  opt.replicates = root.count("replicates", 500);
  if (opt.replicates == 0) root.at("replicates").fail("must be positive");
  opt.max_steps = root.count("max_steps", 1000000);
  if (root.has("threshold")) {
    opt.threshold = root.at("threshold").count();
    if (*opt.threshold == 0 || *opt.threshold > n) root.at("threshold").fail("must lie in [1, n]");
  }
  const bool batched = kernel.type == KernelSpec::Type::kGeneric ||
                       kernel.type == KernelSpec::Type::kInformed ||
                       kernel.type == KernelSpec::Type::kPermutation;
  opt.batch_size = batched ? kernel.generic.batch_size : 1;
  return [=](Context& ctx) mutable {
    opt.threads = ctx.threads;
    const RngStream base(ctx.seed, 0);
    RngStream ds = base.child(0);
    const Problem problem = make_problem(model, n, ds);
    const auto k = make_kernel(kernel, problem, base.child(1));
    const diagnostics::StartState start = [&](RngStream& s) {
      return k->initial_state(problem.theta0, *problem.target, s);
    };
    const auto res = diagnostics::covering_time(*k, *problem.target, start, opt, base.child(2));
    std::string body = "replicate,time,censored\n";
    for (std::size_t r = 0; r < res.times.size(); ++r) {
      const bool cens = !std::isfinite(res.times[r]);
      body += fmt::format("{},{},{}\n", r, cens ? std::string() : g17(res.times[r]), cens ? 1 : 0);
    }
    ctx.out->csv("covering.csv", body);
    nlohmann::json j = {{"tau", std::isfinite(res.tau) ? nlohmann::json(res.tau) : nlohmann::json()},
                        {"quantile", res.quantile},
                        {"threshold", res.threshold},
                        {"replicates", res.times.size()},
                        {"censored", res.censored},
                        {"lower_bound", res.lower_bound},
                        {"log_n", std::log(static_cast<double>(n))},
                        {"kernel", k->config_json()}};
    ctx.out->json("covering.json", j);
    return Stats{};
  };
}

// ---- scaling ---------------------------------------------------------------

Job parse_scaling(const Field& root) {
  root.only({"seed", "description", "model", "ns", "kernel", "steps", "burn_in"});
  const ModelSpec model = parse_model(root.at("model"));
  const std::vector<std::size_t> ns = root.at("ns").counts();
  if (ns.size() < 2) root.at("ns").fail("needs at least two sizes");
  const std::size_t smallest = *std::min_element(ns.begin(), ns.end());
  if (smallest == 0) root.at("ns").fail("sizes must be positive");
  const Field kf = root.at("kernel");
  if (kf.has("weights") && !kf.at("weights").raw().is_string()) {
    kf.at("weights").fail("explicit weights cannot span several n; use \"random\"");
  }
  const KernelSpec kernel = parse_kernel(kf, model, smallest);
  const std::size_t steps = root.count("steps", 100000);
  const std::size_t burn = root.count("burn_in", 1000);
  if (steps < 2) root.at("steps").fail("must be at least 2");
  return [=](Context& ctx) {
    diagnostics::ScalingOptions so;
    so.steps = [steps](std::size_t) { return steps; };
    so.burn_in = [burn](std::size_t) { return burn; };
    so.threads = ctx.threads;
    auto setup = [&](std::size_t n, RngStream& s) {
      Problem p = make_problem(model, n, s);
      diagnostics::ScalingSetup out;
      out.kernel = make_kernel(kernel, p, s.child(1));
      RngStream init = s.child(2);
      out.initial = out.kernel->initial_state(p.theta0, *p.target, init);
      out.target = std::move(p.target);
      return out;
    };
    const auto res = diagnostics::scaling_experiment(ns, setup, so, RngStream(ctx.seed, 0));
    ctx.out->csv("scaling.csv", to_text([&](std::ostream& o) { diagnostics::write_scaling_csv(o, res); }));
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : res.rows) {
      rows.push_back({{"n", r.n}, {"acceptance", r.acceptance}, {"iat", r.iat}, {"reliable", r.reliable}});
    }
    ctx.out->json("scaling.json",
                  {{"slope", res.slope}, {"intercept", res.intercept}, {"reliable", res.reliable}, {"rows", rows}});
    return Stats{};
  };
}

// ---- toy -------------------------------------------------------------------

Job parse_toy(const Field& root) {
  root.only({"seed", "description", "toy", "ns", "m", "tv_tolerance"});
  models::ToyModel toy;
  toy.variant = parse_toy_variant(root.at("toy"));
  const std::vector<std::size_t> ns = root.at("ns").counts();
  if (ns.empty()) root.at("ns").fail("must not be empty");
  bool sqrt_rule = true;
  std::size_t fixed_m = 0;
  if (root.has("m")) {
    const Field m = root.at("m");
    if (m.raw().is_string()) {
      if (m.text() != "sqrt") m.fail("expected an integer or \"sqrt\"");
    } else {
      sqrt_rule = false;
      fixed_m = m.count();
      for (std::size_t n : ns) {
        if (fixed_m > n) m.fail("exceeds n = " + std::to_string(n));
      }
    }
  }
  const double tol = root.number("tv_tolerance", 1e-9);
  if (!(tol > 0)) root.at("tv_tolerance").fail("must be positive");
  return [=](Context& ctx) {
    const auto rows = parallel_map(ns.size(), ctx.threads, [&](std::size_t i) {
      RngStream s = RngStream(ctx.seed, 0).child(i);
      const Dataset data = models::sample_toy_dataset(toy, ns[i], s);
      const std::size_t m = sqrt_rule ? diagnostics::sqrt_subsample_size(ns[i]) : fixed_m;
      return diagnostics::subsample_posterior_tv(toy, data, m, tol);
    });
    std::string body = "n,m,tv_closed_form,tv_quadrature,abs_difference\n";
    for (const auto& r : rows) {
      body += fmt::format("{},{},{},{},{}\n", r.n, r.m, g17(r.closed_form), g17(r.quadrature),
                          g17(std::abs(r.closed_form - r.quadrature)));
    }
    ctx.out->csv("toy.csv", body);
    return Stats{};
  };
}

// ---- anticoncentration -----------------------------------------------------

// Largest mass of (X_1 + .. + X_m) / sqrt(m) in a window of length eps,
// attained at the centre of the Irwin-Hall law.
double irwin_hall_window(std::size_t m, double eps) {
  const double w = eps * std::sqrt(static_cast<double>(m));
  if (m == 1) return std::min(w, 1.0);
  const double c = 0.5 * static_cast<double>(m);
  return diagnostics::irwin_hall_cdf(m, c + w / 2) - diagnostics::irwin_hall_cdf(m, c - w / 2);
}

Job parse_anticoncentration(const Field& root) {
  root.only({"seed", "description", "m", "vectors", "epsilon", "samples", "width"});
  std::vector<std::vector<double>> vs;
  if (root.has("m")) {
    for (std::size_t m : root.at("m").counts()) {
      if (m == 0) root.at("m").fail("entries must be positive");
      vs.emplace_back(m, 1.0 / std::sqrt(static_cast<double>(m)));
    }
  }
  if (root.has("vectors")) {
    const Field v = root.at("vectors");
    for (std::size_t i = 0; i < v.size(); ++i) {
      vs.push_back(v.at(i).numbers());
      double norm2 = 0.0;
      for (double x : vs.back()) norm2 += x * x;
      if (std::abs(norm2 - 1.0) > 1e-9) v.at(i).fail("must be a unit vector");
    }
  }
  if (vs.empty()) root.at("m");  // names the missing field
  const double eps = root.number("epsilon", 0.1);
  if (!(eps > 0)) root.at("epsilon").fail("must be positive");
  const std::size_t samples = root.count("samples", 1000000);
  if (samples < 2) root.at("samples").fail("must be at least 2");
  const double width = root.number("width", 1.0);
  if (!(width > 0)) root.at("width").fail("must be positive");
  return [=](Context& ctx) {
    const auto rows = parallel_map(vs.size(), ctx.threads, [&](std::size_t i) {
      RngStream s = RngStream(ctx.seed, 0).child(i);
      return diagnostics::anticoncentration_check({vs[i], eps, samples, width}, s);
    });
    std::string body = "case,m,epsilon,empirical,window_start,bound,mc_sigma,within_bound,irwin_hall\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const double flat = 1.0 / std::sqrt(static_cast<double>(vs[i].size()));
      const bool ones = width == 1.0 && std::all_of(vs[i].begin(), vs[i].end(),
                                                    [&](double x) { return std::abs(x - flat) < 1e-15; });
      body += fmt::format("{},{},{},{},{},{},{},{},{}\n", i, vs[i].size(), g17(eps), g17(r.empirical),
                          g17(r.window_start), g17(r.bound), g17(r.mc_sigma), r.within_bound ? 1 : 0,
                          ones ? g17(irwin_hall_window(vs[i].size(), eps)) : std::string());
    }
    ctx.out->csv("anticoncentration.csv", body);
    return Stats{};
  };
}

Job parse_job(const std::string& kind, const Field& root) {
  if (kind == "simulate") return parse_simulate(root);
  if (kind == "fluctuation") return parse_fluctuation(root);
  if (kind == "certificate") return parse_certificate(root);
  if (kind == "covering") return parse_covering(root);
  if (kind == "scaling") return parse_scaling(root);
  if (kind == "toy") return parse_toy(root);
  if (kind == "anticoncentration") return parse_anticoncentration(root);
  throw ConfigError("<command>", "unknown experiment '" + kind + "'");
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"simulate", "fluctuation", "certificate", "covering",
                                                 "scaling", "toy", "anticoncentration"};
  return kinds;
}

std::string code_version() { return "sublab 0.1.0"; }

std::string manifest_hash(const std::string& kind, const nlohmann::json& resolved_config) {
  const nlohmann::json key = {{"kind", kind}, {"config", resolved_config}, {"version", code_version()}};
  return fmt::format("{:016x}", fnv1a(key.dump()));
}

RunOutcome run_experiment(const std::string& kind, const nlohmann::json& config,
                          const RunOptions& options) {
  RunOutcome outcome;
  nlohmann::json resolved = config;
  Job job;
  try {
    const Field root(config, "");
    root.require_object();
    if (options.seed) {
      resolved["seed"] = *options.seed;
    } else if (!root.has("seed")) {
      throw ConfigError("seed", "missing required field (or pass --seed)");
    } else {
      root.at("seed").count();
    }
    job = parse_job(kind, root);
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfig;
    outcome.message = std::string("config error: ") + e.what();
    return outcome;
  }

  outcome.manifest_hash = manifest_hash(kind, resolved);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::filesystem::create_directories(options.out_dir);
    Writer writer(options.out_dir, outcome.manifest_hash);
    Context ctx{resolved["seed"].get<std::uint64_t>(), std::max(1u, options.threads), &writer};
    const Stats st = job(ctx);
    if (!st.log.empty()) {
      std::string body;
      for (const auto& line : st.log) body += line + "\n";
      writer.csv("failures.log", body);
    }
    if (st.replicates > 0 && 10 * st.failures > st.replicates) {
      outcome.exit_code = kExitReplicates;
      outcome.message = fmt::format("{} of {} replicates failed; see failures.log", st.failures, st.replicates);
    }
    outcome.artifacts = writer.names();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json manifest = {{"kind", kind},
                               {"config", resolved},
                               {"seed", ctx.seed},
                               {"code_version", code_version()},
                               {"threads", ctx.threads},
                               {"wall_time_seconds", wall},
                               {"artifacts", outcome.artifacts},
                               {"replicates", st.replicates},
                               {"failures", st.failures},
                               {"manifest_hash", outcome.manifest_hash}};
    std::ofstream(options.out_dir / "manifest.json", std::ios::binary | std::ios::trunc) << manifest.dump(2) << "\n";
  } catch (const std::exception& e) {
    outcome.exit_code = kExitRuntime;
    outcome.message = std::string("runtime error: ") + e.what();
  }
  return outcome;
}

}  // namespace sublab::cli
