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

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "sublab/models/glm.hpp"
#include "sublab/models/mle.hpp"
#include "sublab/models/sampling.hpp"
#include "sublab/models/toy.hpp"

namespace sublab::models {
namespace {

// Composite Simpson on [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

Dataset random_dataset(const GlmFamily& fam, int n, int d, std::uint64_t seed) {
  RngStream s(seed, 0);
  Eigen::VectorXd beta0(d);
  for (int j = 0; j < d; ++j) beta0[j] = s.uniform(-1.0, 1.0);
  return sample_dataset(fam, beta0, CovariateLaw::unit_box(static_cast<std::size_t>(d)),
                        static_cast<std::size_t>(n), s);
}

// IRLS written from scratch: weighted least squares on the working response.
Eigen::VectorXd irls_logistic(const Dataset& data) {
  const Eigen::MatrixXd& x = data.covariates;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd mu = (1.0 + (-eta.array()).exp()).inverse();
    Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
    Eigen::VectorXd z = eta.array() + (data.responses - mu).array() / w.array();
    Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
    Eigen::VectorXd next = (xtw * x).ldlt().solve(xtw * z);
    if ((next - beta).norm() < 1e-14) return next;
    beta = next;
  }
  return beta;
}

TEST(LogPosterior, LogisticAtZero) {
  GlmModel m{GlmFamily::logistic(), Prior::flat()};
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
  Eigen::VectorXd y(4);
  y << 1, 0, 0, 1;
  Dataset data(x, y);
  EXPECT_NEAR(log_posterior(m, data, Eigen::VectorXd::Zero(2)), -4.0 * std::log(2.0), 1e-14);
}

TEST(LogPosterior, PoissonAtZero) {
  GlmModel m{GlmFamily::poisson(), Prior::flat()};
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 1);
  Eigen::VectorXd y(3);
  y << 0, 2, 5;
  Dataset data(x, y);
  double expected = 0.0;
  for (double v : {0.0, 2.0, 5.0}) expected += -1.0 - std::lgamma(v + 1.0);
  EXPECT_NEAR(log_posterior(m, data, Eigen::VectorXd::Zero(1)), expected, 1e-12);
}

TEST(LogPosterior, LogisticMatchesBernoulliProduct) {
  GlmModel m{GlmFamily::logistic(), Prior{2.0}};
  Dataset data = random_dataset(GlmFamily::logistic(), 3, 2, 17);
  Eigen::VectorXd beta(2);
  beta << 0.7, -1.3;
  double prod = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-data.covariates.row(i).dot(beta)));
    prod *= data.responses[i] == 1.0 ? p : 1.0 - p;
  }
  const double log_prior = -0.5 * beta.squaredNorm() / 4.0 - std::log(2.0 * std::numbers::pi * 4.0);
  EXPECT_NEAR(log_posterior(m, data, beta) - log_prior, std::log(prod), 1e-12);
}

TEST(LogPosterior, NoOverflowForHugePredictor) {
  GlmModel m{GlmFamily::logistic(), Prior::flat()};
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(2, 1, 1.0);
  Eigen::VectorXd y(2);
  y << 1, 0;
  Dataset data(x, y);
  const double v = log_posterior(m, data, Eigen::VectorXd::Constant(1, 800.0));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, -800.0, 1e-9);
}

TEST(LogPosterior, DimensionMismatchThrows) {
  GlmModel m;
  Dataset data(Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2));
  EXPECT_THROW(log_posterior(m, data, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(Gradient, LogisticAtZeroFlat) {
  GlmModel m{GlmFamily::logistic(), Prior::flat()};
  Dataset data = random_dataset(GlmFamily::logistic(), 10, 3, 5);
  Eigen::VectorXd expected = data.covariates.transpose() * (data.responses.array() - 0.5).matrix();
  EXPECT_LT((grad_log_posterior(m, data, Eigen::VectorXd::Zero(3)) - expected).norm(), 1e-12);
}

class FamilyDerivatives : public ::testing::TestWithParam<int> {};

GlmFamily family_by_index(int k) {
  switch (k) {
    case 0: return GlmFamily::logistic();
    case 1: return GlmFamily::binomial(5);
    case 2: return GlmFamily::poisson();
    default: return GlmFamily::gaussian_identity(0.7);
  }
}

TEST_P(FamilyDerivatives, GradientAndHessianMatchCentralDifferences) {
  const GlmFamily fam = family_by_index(GetParam());
  GlmModel m{fam, Prior{1.5}};
  RngStream s(1000 + static_cast<std::uint64_t>(GetParam()), 0);
  for (int rep = 0; rep < 20; ++rep) {
    Dataset data = random_dataset(fam, 15, 3, 77 + static_cast<std::uint64_t>(rep));
    Eigen::VectorXd beta(3);
    for (int j = 0; j < 3; ++j) beta[j] = s.uniform(-1.0, 1.0);
    const Eigen::VectorXd g = grad_log_posterior(m, data, beta);
    const Eigen::MatrixXd h = hessian_log_posterior(m, data, beta);
    const double eps = 1e-5;
    Eigen::VectorXd g_fd(3);
    Eigen::MatrixXd h_fd(3, 3);
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd bp = beta, bm = beta;
      bp[j] += eps;
      bm[j] -= eps;
      g_fd[j] = (log_posterior(m, data, bp) - log_posterior(m, data, bm)) / (2 * eps);
      h_fd.col(j) = (grad_log_posterior(m, data, bp) - grad_log_posterior(m, data, bm)) / (2 * eps);
    }
    EXPECT_LT((g - g_fd).norm() / std::max(1.0, g.norm()), 1e-6);
    EXPECT_LT((h - h_fd).norm() / std::max(1.0, h.norm()), 1e-6);
    // Score-based Jacobian (prior excluded) against differences of the score.
    const Eigen::MatrixXd j_an = mle_jacobian(m, data, beta);
    Eigen::MatrixXd j_fd(3, 3);
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd bp = beta, bm = beta;
      bp[j] += eps;
      bm[j] -= eps;
      j_fd.col(j) = (score(m, data, bp) - score(m, data, bm)) / (2 * eps);
    }
    EXPECT_LT((j_an - j_fd).norm() / std::max(1.0, j_an.norm()), 1e-6);
    EXPECT_LT((h - m.prior.hessian(3) - j_an).norm(), 1e-12 * std::max(1.0, h.norm()));
  }
}

TEST_P(FamilyDerivatives, CDerivativesMatchDifferences) {
  const GlmFamily fam = family_by_index(GetParam());
  for (double x : {-3.0, -0.4, 0.0, 0.9, 2.5, 31.0, 45.0}) {
    if (fam.kind() == FamilyKind::kPoisson && x > 10) continue;
    const double h = 1e-4;
    EXPECT_NEAR(fam.c1(x), (fam.c(x + h) - fam.c(x - h)) / (2 * h), 1e-6 * std::max(1.0, std::abs(fam.c1(x))));
    EXPECT_NEAR(fam.c2(x), (fam.c1(x + h) - fam.c1(x - h)) / (2 * h), 1e-6 * std::max(1.0, std::abs(fam.c2(x))));
    EXPECT_NEAR(fam.c3(x), (fam.c2(x + h) - fam.c2(x - h)) / (2 * h), 1e-6 * std::max(1.0, std::abs(fam.c3(x))));
    EXPECT_NEAR(fam.c4(x), (fam.c3(x + h) - fam.c3(x - h)) / (2 * h), 1e-6 * std::max(1.0, std::abs(fam.c4(x))));
  }
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, FamilyDerivatives, ::testing::Values(0, 1, 2, 3));

TEST(Hessian, LogisticNegativeSemidefinite) {
  GlmModel m{GlmFamily::logistic(), Prior{1.0}};
  RngStream s(4, 4);
  for (int rep = 0; rep < 10; ++rep) {
    Dataset data = random_dataset(GlmFamily::logistic(), 20, 3, 300 + static_cast<std::uint64_t>(rep));
    Eigen::VectorXd beta(3);
    for (int j = 0; j < 3; ++j) beta[j] = s.uniform(-5.0, 5.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian_log_posterior(m, data, beta));
    EXPECT_LT(es.eigenvalues().maxCoeff(), 0.0);
  }
}

TEST(MleJacobian, LogisticAtZeroIsQuarterGram) {
  GlmModel m{GlmFamily::logistic(), Prior::flat()};
  Dataset data = random_dataset(GlmFamily::logistic(), 12, 2, 8);
  const Eigen::MatrixXd expected = -0.25 * data.covariates.transpose() * data.covariates;
  EXPECT_LT((mle_jacobian(m, data, Eigen::VectorXd::Zero(2)) - expected).norm(), 1e-13);
}

TEST(Mle, LogisticSymmetric) {
  GlmModel m{GlmFamily::logistic(), Prior::flat()};
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 1);
  Eigen::VectorXd y(2);
  y << 1, 0;
  MleResult r = mle(m, Dataset(x, y));
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.beta[0], 0.0, 1e-12);
}

TEST(Mle, PoissonClosedForm) {
  GlmModel m{GlmFamily::poisson(), Prior::flat()};
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 1);
  Eigen::VectorXd y(2);
  y << 3, 6;
  MleResult r = mle(m, Dataset(x, y));
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.beta[0], std::log(4.5), 1e-12);
}

TEST(Mle, LogisticMatchesIrls) {
  GlmModel m{GlmFamily::logistic(), Prior::flat()};
  RngStream s(2024, 0);
  Eigen::VectorXd beta0(2);
  beta0 << 0.8, -0.5;
  Dataset data = sample_dataset(GlmFamily::logistic(), beta0, CovariateLaw::unit_box(2), 100, s);
  MleResult r = mle(m, data);
  ASSERT_TRUE(r.ok()) << to_string(r.status);
  EXPECT_LT(r.gradient_norm, 1e-10);
  EXPECT_LT((r.beta - irls_logistic(data)).norm(), 1e-8);
}

TEST(Mle, SeparationIsReported) {
  GlmModel m{GlmFamily::logistic(), Prior::flat()};
  Eigen::MatrixXd x(4, 1);
  x << -2, -1, 1, 2;
  Eigen::VectorXd y(4);
  y << 0, 0, 1, 1;
  MleResult r = mle(m, Dataset(x, y));
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.status, MleStatus::kSeparation);
  EXPECT_THROW(mle_or_throw(m, Dataset(x, y)), std::runtime_error);
}

TEST(Mle, PermutationEquivariant) {
  GlmModel m{GlmFamily::poisson(), Prior::flat()};
  Dataset data = random_dataset(GlmFamily::poisson(), 60, 2, 99);
  std::vector<std::size_t> perm(60);
  for (std::size_t i = 0; i < 60; ++i) perm[i] = (i * 7 + 3) % 60;
  const Eigen::VectorXd a = mle_or_throw(m, data);
  const Eigen::VectorXd b = mle_or_throw(m, data.permuted(perm));
  EXPECT_LT((a - b).norm(), 1e-8);
}

TEST(Sensitivity, ZeroAtZeroBeta) {
  GlmModel m{GlmFamily::logistic(), Prior{1.0}};
  Dataset data = random_dataset(GlmFamily::logistic(), 5, 2, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(sensitivity_D(m, data, Eigen::VectorXd::Zero(2), i, j), 0.0);
    }
  }
}

TEST(Sensitivity, LogisticHalf) {
  GlmModel m{GlmFamily::logistic(), Prior{1.0}};
  Dataset data(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(sensitivity_D(m, data, Eigen::VectorXd::Ones(1), 0, 0), 0.5, 1e-15);
}

TEST(Sensitivity, MatchesDifferenceInCovariate) {
  for (int k = 0; k < 4; ++k) {
    const GlmFamily fam = family_by_index(k);
    GlmModel m{fam, Prior{1.0}};
    Dataset data = random_dataset(fam, 6, 3, 40 + static_cast<std::uint64_t>(k));
    Eigen::VectorXd beta(3);
    beta << 0.3, -0.8, 0.5;
    const double eps = 1e-5;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        Dataset p = data, q = data;
        p.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += eps;
        q.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= eps;
        const double fd = (log_posterior(m, p, beta) - log_posterior(m, q, beta)) / (2 * eps);
        EXPECT_NEAR(sensitivity_D(m, data, beta, i, j), fd, 1e-6);
      }
    }
  }
}

TEST(Sensitivity, DmaxMatchesBruteForceDifferences) {
  // (1/p) d^2 p / dx_a dx_b = L_ab + L_a L_b for p = exp(L); both from differences.
  for (int k = 0; k < 4; ++k) {
    const GlmFamily fam = family_by_index(k);
    GlmModel m{fam, Prior{1.0}};
    Dataset data = random_dataset(fam, 4, 2, 60 + static_cast<std::uint64_t>(k));
    Eigen::VectorXd beta(2);
    beta << 0.9, -1.4;
    const double eps = 1e-4;
    auto lp = [&](const Dataset& dd) { return log_posterior(m, dd, beta); };
    auto bump = [&](Dataset dd, int a, double h) {
      dd.covariates(a / 2, a % 2) += h;
      return dd;
    };
    std::vector<double> first(8);
    for (int a = 0; a < 8; ++a) first[a] = (lp(bump(data, a, eps)) - lp(bump(data, a, -eps))) / (2 * eps);
    double best = 0.0;
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        const double second =
            (lp(bump(bump(data, a, eps), b, eps)) - lp(bump(bump(data, a, eps), b, -eps)) -
             lp(bump(bump(data, a, -eps), b, eps)) + lp(bump(bump(data, a, -eps), b, -eps))) /
            (4 * eps * eps);
        best = std::max(best, std::abs(second + first[a] * first[b]));
      }
    }
    EXPECT_NEAR(sensitivity_Dmax(m, data, beta), best, 1e-4 * std::max(1.0, best)) << fam.name();
  }
}

TEST(Toy, GaussianNoData) {
  ToyPosterior p = toy_posterior(ToyModel{}, std::span<const double>());
  EXPECT_EQ(p.mean, 0.0);
  EXPECT_EQ(p.variance, 1.0);
}

TEST(Toy, GaussianThreeObservationsAgainstQuadrature) {
  const std::vector<double> obs{0.5, 1.0, 1.5};
  ToyModel model{ToyVariant::kGaussianHierarchy};
  ToyPosterior p = toy_posterior(model, std::span<const double>(obs));
  EXPECT_NEAR(p.mean, 0.75, 1e-15);
  EXPECT_NEAR(p.variance, 0.25, 1e-15);
  auto unnorm = [&](double t) {
    double l = -0.5 * t * t;
    for (double y : obs) l += -0.5 * (y - t) * (y - t);
    return std::exp(l);
  };
  const double z = simpson(unnorm, -10, 10, 4000);
  const double mean = simpson([&](double t) { return t * unnorm(t); }, -10, 10, 4000) / z;
  const double m2 = simpson([&](double t) { return t * t * unnorm(t); }, -10, 10, 4000) / z;
  EXPECT_NEAR(mean, 0.75, 1e-9);
  EXPECT_NEAR(m2 - mean * mean, 0.25, 1e-9);
  EXPECT_NEAR(simpson([&](double t) { return p.density(t); }, -10, 10, 4000), 1.0, 1e-8);
}

TEST(Toy, ExponentialTailAgainstQuadrature) {
  const std::vector<double> obs{-2.0, 3.0, 4.0};
  ToyModel model{ToyVariant::kExponentialTail};
  ToyPosterior p = toy_posterior(model, std::span<const double>(obs));
  EXPECT_NEAR(p.rate, 10.0, 1e-15);
  auto unnorm = [&](double t) {
    double l = -t;
    for (double y : obs) l += -t * std::abs(y);
    return std::exp(l);
  };
  const double z = simpson(unnorm, 0, 8, 20000);
  const double mean = simpson([&](double t) { return t * unnorm(t); }, 0, 8, 20000) / z;
  EXPECT_NEAR(mean, 0.1, 1e-9);
  EXPECT_NEAR(simpson([&](double t) { return p.density(t); }, 0, 8, 20000), 1.0, 1e-8);
}

TEST(Toy, LogPosteriorMatchesClosedFormUpToConstant) {
  RngStream s(8, 0);
  ToyModel model{ToyVariant::kGaussianHierarchy};
  Dataset data = sample_toy_dataset(model, 20, s);
  ToyPosterior p = toy_posterior(model, data);
  const double c0 = toy_log_posterior(model, data, 0.0) - p.log_density(0.0);
  for (double t : {-1.0, 0.3, 2.0}) {
    EXPECT_NEAR(toy_log_posterior(model, data, t) - p.log_density(t), c0, 1e-10);
  }
}

TEST(SampleDataset, LogisticFairCoin) {
  RngStream s(1, 2);
  Dataset data = sample_dataset(GlmFamily::logistic(), Eigen::VectorXd::Zero(2),
                                CovariateLaw::unit_box(2), 10000, s);
  const double mean = data.responses.mean();
  EXPECT_GE(mean, 0.45);
  EXPECT_LE(mean, 0.55);
}

TEST(SampleDataset, CovariatesInBox) {
  RngStream s(1, 3);
  CovariateLaw law = CovariateLaw::box({-0.5, 0.0}, {0.5, 2.0});
  Dataset data = sample_dataset(GlmFamily::poisson(), Eigen::VectorXd::Zero(2), law, 2000, s);
  for (Eigen::Index i = 0; i < data.covariates.rows(); ++i) {
    EXPECT_TRUE(law.contains(data.covariates.row(i)));
  }
  law.kind = CovariateLaw::Kind::kTruncatedGaussian;
  law.gaussian_sd = 0.7;
  Dataset g = sample_dataset(GlmFamily::logistic(), Eigen::VectorXd::Zero(2), law, 2000, s);
  for (Eigen::Index i = 0; i < g.covariates.rows(); ++i) EXPECT_TRUE(law.contains(g.covariates.row(i)));
}

TEST(SampleDataset, PoissonMeanFour) {
  RngStream s(1, 4);
  CovariateLaw law = CovariateLaw::box({1.0}, {1.0});
  Dataset data = sample_dataset(GlmFamily::poisson(), Eigen::VectorXd::Constant(1, std::log(4.0)),
                                law, 10000, s);
  EXPECT_NEAR(data.responses.mean(), 4.0, 0.2);
}

TEST(SampleDataset, ResponsesValidForFamily) {
  RngStream s(1, 5);
  const GlmFamily fam = GlmFamily::binomial(3);
  Dataset data = sample_dataset(fam, Eigen::VectorXd::Ones(2), CovariateLaw::unit_box(2), 500, s);
  EXPECT_NO_THROW(validate(GlmModel{fam, Prior{}}, data));
}

TEST(DatasetIo, CsvRoundTrip) {
  RngStream s(1, 6);
  Dataset data = sample_dataset(GlmFamily::logistic(), Eigen::VectorXd::Ones(3),
                                CovariateLaw::unit_box(3), 25, s);
  std::stringstream ss;
  write_dataset_csv(ss, data);
  Dataset back = read_dataset_csv(ss);
  EXPECT_EQ(back.covariates, data.covariates);
  EXPECT_EQ(back.responses, data.responses);
  const auto side = dataset_sidecar(GlmFamily::logistic(), data, CovariateLaw::unit_box(3), 1, 6);
  EXPECT_EQ(side["family"], "logistic");
  EXPECT_EQ(covariate_law_from_json(side["gamma"]).upper, std::vector<double>(3, 1.0));
}

}  // namespace
}  // namespace sublab::models
