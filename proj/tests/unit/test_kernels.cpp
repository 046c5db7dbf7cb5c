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

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "sublab/kernels/firefly.hpp"
#include "sublab/kernels/subsampling.hpp"
#include "sublab/models/mle.hpp"
#include "sublab/models/sampling.hpp"

namespace sublab::kernels {
namespace {

using models::CovariateLaw;
using models::GlmFamily;
using models::GlmModel;
using models::Prior;

// Mean and its Monte Carlo sd from 50 batch means.
std::pair<double, double> batch_mean(const std::vector<double>& xs) {
  const std::size_t b = 50, len = xs.size() / b;
  std::vector<double> means(b, 0.0);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < len; ++j) means[i] += xs[i * len + j];
    means[i] /= static_cast<double>(len);
  }
  double m = 0.0;
  for (double v : means) m += v;
  m /= b;
  double var = 0.0;
  for (double v : means) var += (v - m) * (v - m);
  var /= (b - 1);
  return {m, std::sqrt(var / b)};
}

GlmTarget logistic_target(std::size_t n, std::uint64_t seed, int d = 1) {
  RngStream s(seed, 0);
  Eigen::VectorXd beta0 = Eigen::VectorXd::Constant(d, 0.8);
  return GlmTarget(GlmModel{GlmFamily::logistic(), Prior{1.0}},
                   models::sample_dataset(GlmFamily::logistic(), beta0,
                                          CovariateLaw::unit_box(static_cast<std::size_t>(d)), n, s));
}

ToyTarget gaussian_target(std::size_t n, std::uint64_t seed) {
  RngStream s(seed, 0);
  models::ToyModel model{models::ToyVariant::kGaussianHierarchy};
  return ToyTarget(model, models::sample_toy_dataset(model, n, s));
}

TEST(FullMh, UsesEverything) {
  GlmTarget t = logistic_target(30, 1);
  FullMh k(1.0);
  RngStream s(5, 0);
  StepResult r = k.step(k.initial_state(Eigen::VectorXd::Zero(1), t, s), t, s);
  EXPECT_TRUE(r.used.all);
  EXPECT_EQ(r.used.size(30), 30u);
}

TEST(FullMh, PriorOnlyAcceptsUphill) {
  ToyTarget t(models::ToyModel{}, Dataset(Eigen::MatrixXd::Zero(0, 1), Eigen::VectorXd::Zero(0)));
  FullMh k(0.5);
  KernelState st;
  st.theta = Eigen::VectorXd::Constant(1, 2.0);
  int uphill = 0, uphill_accepted = 0;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    RngStream s(7, i);
    StepResult r = k.step(st, t, s);
    RngStream replay = s.child(purpose::kProposal);
    const double prop = uniform_proposal(st.theta, 0.5, replay)[0];
    if (std::abs(prop) < 2.0) {
      ++uphill;
      uphill_accepted += r.accepted ? 1 : 0;
    }
  }
  EXPECT_GT(uphill, 0);
  EXPECT_EQ(uphill, uphill_accepted);
}

TEST(FullMh, GaussianHierarchyMean) {
  ToyTarget t = gaussian_target(100, 3);
  const models::ToyPosterior post = models::toy_posterior(t.model(), t.data());
  FullMh k(1.0);
  RngStream s(11, 0);
  RunOptions opts;
  opts.steps = 100000;
  ChainRun run = run_chain(k, t, k.initial_state(Eigen::VectorXd::Constant(1, post.mean), t, s),
                           opts, s);
  std::vector<double> xs = run.trace.component(0);
  auto [m, sd] = batch_mean(xs);
  EXPECT_LT(std::abs(m - post.mean), 3.0 * sd) << m << " vs " << post.mean << " sd " << sd;
  EXPECT_EQ(run.trace.states.size(), run.trace.ledger.steps() + 1);
}

TEST(Generic, SingleBatchSize) {
  GlmTarget t = logistic_target(100, 2);
  GenericSubsampler k(GenericConfig{1.0, 10, 1.0, 100});
  RngStream s(1, 1);
  StepResult r = k.step(k.initial_state(Eigen::VectorXd::Zero(1), t, s), t, s);
  EXPECT_EQ(r.used.size(100), 10u);
  std::set<std::uint32_t> distinct(r.used.indices.begin(), r.used.indices.end());
  EXPECT_EQ(distinct.size(), 10u);
}

TEST(Generic, FullBatchReproducesFullMh) {
  GlmTarget t = logistic_target(40, 4, 2);
  FullMh full(1.3);
  GenericSubsampler gen(GenericConfig{1.3, 40, 1.0, 1});
  RngStream s(21, 0);
  RunOptions opts;
  opts.steps = 500;
  KernelState init;
  init.theta = Eigen::VectorXd::Zero(2);
  ChainRun a = run_chain(full, t, init, opts, s);
  ChainRun b = run_chain(gen, t, init, opts, s);
  ASSERT_EQ(a.trace.states.size(), b.trace.states.size());
  for (std::size_t i = 0; i < a.trace.states.size(); ++i) {
    ASSERT_EQ(a.trace.states[i], b.trace.states[i]) << "step " << i;
  }
  EXPECT_GT(a.accepted, 0u);
}

TEST(Generic, BatchIndicesUniform) {
  const std::size_t n = 50, k = 10, steps = 100000;
  GenericSubsampler gen(GenericConfig{1.0, k, 1.0, 1});
  std::vector<int> counts(n, 0);
  RngStream s(3, 3);
  for (std::size_t t = 0; t < steps; ++t) {
    RngStream st = s.child(t);
    RngStream batch = st.child(purpose::kBatch), growth = st.child(purpose::kGrowth);
    auto pos = gen.draw_positions(n, batch, growth);
    ASSERT_TRUE(pos.has_value());
    std::set<std::uint32_t> distinct(pos->begin(), pos->end());
    ASSERT_EQ(distinct.size(), k);
    for (auto p : *pos) counts[p]++;
  }
  const double p = static_cast<double>(k) / n;
  const double mean = steps * p, sd = std::sqrt(steps * p * (1 - p));
  for (int c : counts) EXPECT_LT(std::abs(c - mean), 3.0 * sd);
}

TEST(Generic, GeometricGrowthTailAndAbort) {
  // delta = 0.5: the number of batches is geometric with mean 2.
  GenericSubsampler gen(GenericConfig{1.0, 5, 0.5, 60});
  std::vector<int> hist(64, 0);
  RngStream s(4, 4);
  for (std::uint64_t t = 0; t < 40000; ++t) {
    RngStream st = s.child(t);
    RngStream batch = st.child(purpose::kBatch), growth = st.child(purpose::kGrowth);
    auto pos = gen.draw_positions(1000, batch, growth);
    ASSERT_TRUE(pos.has_value());
    hist[pos->size() / 5]++;
  }
  // P(B >= b) = 2^-(b-1).
  for (int b = 1; b <= 8; ++b) {
    int tail = 0;
    for (std::size_t j = static_cast<std::size_t>(b); j < hist.size(); ++j) tail += hist[j];
    const double expected = 40000.0 * std::pow(0.5, b - 1);
    EXPECT_NEAR(tail, expected, 4.0 * std::sqrt(expected) + 1);
  }
  GenericSubsampler tiny(GenericConfig{1.0, 1, 0.0, 3});
  GlmTarget t = logistic_target(50, 9);
  RngStream r(1, 0);
  StepResult res = tiny.step(tiny.initial_state(Eigen::VectorXd::Zero(1), t, r), t, r);
  EXPECT_EQ(res.status, StepStatus::kAborted);
  EXPECT_THROW(run_chain(tiny, t, res.state, RunOptions{5}, r), std::runtime_error);
}

TEST(Informed, UniformWeightsMatchUniformBatches) {
  const std::size_t n = 6, k = 2;
  InformedSubsampler inf(GenericConfig{1.0, k, 1.0, 1}, std::vector<double>(n, 1.0), 1.0);
  std::vector<int> pair_counts(n * n, 0);
  RngStream s(5, 0);
  const int draws = 60000;
  for (int t = 0; t < draws; ++t) {
    auto b = inf.draw_batch(s);
    ASSERT_EQ(b.size(), k);
    pair_counts[b[0] * n + b[1]]++;
  }
  // 15 equally likely pairs; chi-square with 14 dof, 0.1% critical value 36.12.
  const double expected = draws / 15.0;
  double chi2 = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = a + 1; c < n; ++c) {
      const double o = pair_counts[a * n + c];
      chi2 += (o - expected) * (o - expected) / expected;
    }
  }
  EXPECT_LT(chi2, 36.12);
}

TEST(Informed, TwoPointWeights) {
  const double a = 2.0;
  InformedSubsampler inf(GenericConfig{1.0, 1, 1.0, 1}, {a, 1.0 / a}, a);
  RngStream s(6, 0);
  int first = 0;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) first += inf.draw_batch(s)[0] == 0 ? 1 : 0;
  const double p = a * a / (1 + a * a);
  EXPECT_NEAR(first, draws * p, 3.0 * std::sqrt(draws * p * (1 - p)));
}

TEST(Informed, SelectionFrequenciesBounded) {
  const std::size_t n = 40, k = 4;
  const double a = 2.0;
  std::vector<double> w(n);
  RngStream ws(7, 0);
  for (auto& v : w) v = std::exp(ws.uniform(-std::log(a), std::log(a)));
  InformedSubsampler inf(GenericConfig{1.0, k, 1.0, 1}, w, a);
  std::vector<int> counts(n, 0);
  RngStream s(7, 1);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    for (auto i : inf.draw_batch(s)) counts[i]++;
  }
  const double base = static_cast<double>(k) / n;
  for (int c : counts) {
    const double f = static_cast<double>(c) / draws;
    EXPECT_GE(f, base / (a * a) * 0.9);
    EXPECT_LE(f, base * a * a * 1.1);
  }
}

TEST(Informed, RejectsOutOfRangeWeights) {
  EXPECT_THROW(InformedSubsampler(GenericConfig{}, {1.0, 3.0}, 2.0), std::invalid_argument);
  EXPECT_THROW(InformedSubsampler(GenericConfig{}, {1.0, 0.4}, 2.0), std::invalid_argument);
}

TEST(Firefly, BoundNeverExceedsLikelihood) {
  RngStream s(8, 0);
  for (int probe = 0; probe < 1000000; ++probe) {
    const double xi = std::abs(s.normal() * 3.0);
    const double t = s.normal() * 6.0;
    const double log_l = t >= 0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
    ASSERT_LE(LogisticBound::log_bound(t, xi), log_l + 1e-12) << "t=" << t << " xi=" << xi;
  }
}

TEST(Firefly, BoundIsTightAtAnchor) {
  for (double xi : {0.0, 0.3, 2.0}) {
    const double log_l = -std::log1p(std::exp(-xi));
    EXPECT_NEAR(LogisticBound::log_bound(xi, xi), log_l, 1e-14);
    EXPECT_NEAR(LogisticBound::log_bound(-xi, xi), -std::log1p(std::exp(xi)), 1e-14);
  }
}

TEST(Firefly, AggregateMatchesSumOfBounds) {
  GlmTarget t = logistic_target(60, 12, 2);
  const Eigen::VectorXd anchor = models::mle_or_throw(t.model(), t.data());
  Firefly ff(FireflyConfig{1.0, 0.2, 0.7, false}, t.data(), anchor);
  RngStream s(1, 2);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd beta(2);
    beta << s.normal(), s.normal();
    double direct = 0.0;
    for (std::size_t i = 0; i < 60; ++i) direct += ff.datum_log_bound(t, i, beta);
    EXPECT_NEAR(ff.total_log_bound(beta), direct, 1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST(Firefly, AllBrightRatioIsProductOfBrightFactors) {
  // With every datum bright the bound terms cancel against the bright
  // corrections, leaving prior x prod (L_i - B_i).
  GlmTarget t = logistic_target(30, 13);
  const Eigen::VectorXd anchor = models::mle_or_throw(t.model(), t.data());
  Firefly ff(FireflyConfig{}, t.data(), anchor);
  KernelState a, b;
  a.theta = Eigen::VectorXd::Constant(1, 0.4);
  b.theta = Eigen::VectorXd::Constant(1, 0.9);
  a.bright.assign(30, 1);
  b.bright.assign(30, 1);
  double oracle = t.log_prior(b.theta) - t.log_prior(a.theta);
  for (std::size_t i = 0; i < 30; ++i) {
    auto log_diff = [&](const Eigen::VectorXd& beta) {
      const double l = std::exp(t.datum_log_likelihood(i, beta));
      const double bnd = std::exp(ff.datum_log_bound(t, i, beta));
      return std::log(l - bnd);
    };
    oracle += log_diff(b.theta) - log_diff(a.theta);
  }
  // The oracle subtracts nearly equal numbers, so compare relatively.
  EXPECT_NEAR(ff.joint_log_density(b, t) - ff.joint_log_density(a, t), oracle, 1e-6 * std::abs(oracle));
}

TEST(Firefly, LongRunMeanMatchesFullMh) {
  GlmTarget t = logistic_target(200, 14);
  const Eigen::VectorXd anchor = models::mle_or_throw(t.model(), t.data());
  Firefly ff(FireflyConfig{1.5, 0.2, 1.0, false}, t.data(), anchor);
  FullMh full(1.5);
  RunOptions opts;
  opts.steps = 200000;
  RngStream s1(15, 0), s2(15, 1);
  ChainRun a = run_chain(ff, t, ff.initial_state(anchor, t, s1), opts, s1);
  ChainRun b = run_chain(full, t, full.initial_state(anchor, t, s2), opts, s2);
  auto [ma, sa] = batch_mean(a.trace.component(0));
  auto [mb, sb] = batch_mean(b.trace.component(0));
  EXPECT_LT(std::abs(ma - mb), 3.0 * std::sqrt(sa * sa + sb * sb)) << ma << " vs " << mb;
}

TEST(Firefly, UsageIsRefreshedUnionBright) {
  GlmTarget t = logistic_target(100, 16);
  const Eigen::VectorXd anchor = models::mle_or_throw(t.model(), t.data());
  Firefly ff(FireflyConfig{1.0, 0.1, 0.5, false}, t.data(), anchor);
  RngStream s(2, 2);
  KernelState st = ff.initial_state(anchor, t, s);
  StepResult r = ff.step(st, t, s);
  std::set<std::uint32_t> used(r.used.indices.begin(), r.used.indices.end());
  for (std::size_t i = 0; i < 100; ++i) {
    if (r.state.bright[i]) EXPECT_TRUE(used.count(static_cast<std::uint32_t>(i)));
  }
  EXPECT_GE(used.size(), 10u);
  Firefly all(FireflyConfig{1.0, 1.0, 1.0, false}, t.data(), anchor);
  StepResult full = all.step(st, t, s);
  EXPECT_TRUE(full.used.all);
}

TEST(PermutationWrapper, UsageIsLabelPrefix) {
  const std::size_t n = 80;
  GlmTarget t = logistic_target(n, 17);
  auto inner = std::make_shared<GenericSubsampler>(GenericConfig{1.0, 5, 1.0, 1});
  PermutationWrapper w(inner, n, RngStream(17, 99));
  RngStream s(3, 0);
  RunOptions opts;
  opts.steps = 60;
  ChainRun run = run_chain(w, t, w.initial_state(Eigen::VectorXd::Zero(1), t, s), opts, s);
  const std::size_t m = run.final_state.scan_pos;
  EXPECT_EQ(m, run.trace.ledger.cumulative_size());
  for (std::size_t l = 0; l < m; ++l) EXPECT_TRUE(run.trace.ledger.is_covered(w.permutation()[l]));
  const auto& order = run.trace.ledger.first_use_order();
  for (std::size_t l = 0; l < order.size(); ++l) EXPECT_EQ(order[l], w.permutation()[l]);
}

TEST(PermutationWrapper, FirstUseOrderIsUniform) {
  // Rank of datum 0 in the first-use order across independent wrappers.
  const std::size_t n = 10;
  GlmTarget t = logistic_target(n, 18);
  auto inner = std::make_shared<GenericSubsampler>(GenericConfig{1.0, 2, 1.0, 1});
  std::vector<int> rank_counts(n, 0);
  const int reps = 5000;
  for (int rep = 0; rep < reps; ++rep) {
    PermutationWrapper w(inner, n, RngStream(18, static_cast<std::uint64_t>(rep)));
    RngStream s(19, static_cast<std::uint64_t>(rep));
    KernelState st = w.initial_state(Eigen::VectorXd::Zero(1), t, s);
    UsageLedger ledger(n);
    for (std::uint64_t step = 1; ledger.cumulative_size() < n; ++step) {
      RngStream ss = s.child(step);
      StepResult r = w.step(st, t, ss);
      ledger.record(r.used);
      st = r.state;
    }
    const auto& order = ledger.first_use_order();
    rank_counts[std::find(order.begin(), order.end(), 0u) - order.begin()]++;
  }
  const double expected = static_cast<double>(reps) / n;
  double chi2 = 0.0;
  for (int c : rank_counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 21.67);  // 9 dof, 1%
}

TEST(PermutationWrapper, ThetaLawUnchanged) {
  ToyTarget t = gaussian_target(100, 20);
  auto inner = std::make_shared<GenericSubsampler>(GenericConfig{1.0, 10, 1.0, 1});
  PermutationWrapper w(inner, 100, RngStream(20, 1));
  RunOptions opts;
  opts.steps = 1000;
  std::vector<double> ends_plain, ends_wrapped;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    RngStream s(21, rep);
    KernelState init;
    init.theta = Eigen::VectorXd::Zero(1);
    opts.record_states = false;
    ends_plain.push_back(run_chain(*inner, t, init, opts, s).final_state.theta[0]);
    ends_wrapped.push_back(run_chain(w, t, init, opts, s.child(7)).final_state.theta[0]);
  }
  // Two-sample Kolmogorov-Smirnov at 1%: D < 1.628 sqrt(2/200).
  std::sort(ends_plain.begin(), ends_plain.end());
  std::sort(ends_wrapped.begin(), ends_wrapped.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < 200 && j < 200) {
    if (ends_plain[i] <= ends_wrapped[j]) ++i; else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) - static_cast<double>(j)) / 200.0);
  }
  EXPECT_LT(d, 1.628 * std::sqrt(2.0 / 200.0));
}

}  // namespace
}  // namespace sublab::kernels

namespace sublab::kernels {
namespace {

// Perturb one datum outside `used`, replay the same step, compare bitwise.
template <class MakeTarget>
int soundness_probes(const Kernel& kernel, const Dataset& base, MakeTarget make, int probes,
                     std::uint64_t seed) {
  auto target = make(base);
  RngStream init_stream(seed, 999);
  KernelState state = kernel.initial_state(Eigen::VectorXd::Constant(target.dim(), 0.3), target,
                                           init_stream);
  int checked = 0;
  for (int p = 0; p < probes; ++p) {
    RngStream s = RngStream(seed, 0).child(static_cast<std::uint64_t>(p));
    RngStream s_copy = s;
    StepResult r = kernel.step(state, target, s);
    std::vector<std::uint32_t> unused;
    for (std::uint32_t i = 0; i < base.n(); ++i) {
      if (!r.used.contains(i)) unused.push_back(i);
    }
    if (!unused.empty()) {
      RngStream pick(seed, 1000 + static_cast<std::uint64_t>(p));
      const std::uint32_t victim = unused[pick.uniform_index(unused.size())];
      Dataset altered = base;
      altered.covariates.row(victim).array() += 0.37;
      altered.responses[victim] = 1.0 - altered.responses[victim];
      auto other = make(altered);
      StepResult replay = kernel.step(state, other, s_copy);
      EXPECT_EQ(replay.state.theta, r.state.theta) << kernel.name() << " probe " << p;
      EXPECT_EQ(replay.state.bright, r.state.bright) << kernel.name() << " probe " << p;
      EXPECT_EQ(replay.accepted, r.accepted);
      ++checked;
    }
    state = r.state;
  }
  return checked;
}

TEST(UsageSoundness, AllKernels) {
  RngStream s(30, 0);
  const Dataset data = models::sample_dataset(GlmFamily::logistic(), Eigen::VectorXd::Constant(2, 0.5),
                                              CovariateLaw::unit_box(2), 120, s);
  const GlmModel model{GlmFamily::logistic(), Prior{1.0}};
  auto make = [&](const Dataset& d) { return GlmTarget(model, d); };
  const Eigen::VectorXd anchor = models::mle_or_throw(model, data);

  FullMh full(1.0);
  GenericSubsampler generic(GenericConfig{1.0, 10, 1.0, 1});
  GenericSubsampler growing(GenericConfig{1.0, 5, 0.6, 50});
  std::vector<double> w(120);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 + static_cast<double>(i % 7) / 6.0;
  InformedSubsampler informed(GenericConfig{1.0, 10, 1.0, 1}, w, 2.0);
  Firefly firefly(FireflyConfig{1.0, 0.1, 1.0, false}, data, anchor);
  PermutationWrapper wrapped(std::make_shared<GenericSubsampler>(GenericConfig{1.0, 10, 1.0, 1}),
                             120, RngStream(30, 5));

  EXPECT_EQ(soundness_probes(full, data, make, 100, 1), 0);  // nothing is ever unused
  EXPECT_EQ(soundness_probes(generic, data, make, 100, 2), 100);
  EXPECT_EQ(soundness_probes(growing, data, make, 100, 3), 100);
  EXPECT_EQ(soundness_probes(informed, data, make, 100, 4), 100);
  EXPECT_EQ(soundness_probes(firefly, data, make, 100, 5), 100);
  EXPECT_EQ(soundness_probes(wrapped, data, make, 100, 6), 100);
}

}  // namespace
}  // namespace sublab::kernels
