// Copyright 2026 The krigmis Authors
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

#include <gtest/gtest.h>

#include "krigmis/error.hpp"
#include "krigmis/reference.hpp"
#include "krigmis/risk.hpp"
#include "test_util.hpp"

namespace krigmis {
namespace {

using testing::random_correlation;

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
  const Eigen::VectorXd v = testing::random_vector(n * n, seed);
  Eigen::MatrixXd a = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
  return 0.5 * (a + a.transpose());
}

/// Risk assembled from explicit n x n matrices.
double risk_by_matrices(const KrigingState& truth, const KrigingState& model,
                        const Eigen::MatrixXd& m, std::span<const double> x0) {
  const Eigen::VectorXd g1 = truth.cross(x0), g2 = model.cross(x0);
  const Eigen::VectorXd w1 = truth.gamma_inv() * g1, w2 = model.gamma_inv() * g2;
  const Eigen::MatrixXd m0 = (w2 - w1) * (w2 - w1).transpose() * truth.gamma();
  const Eigen::MatrixXd m1 = m * truth.gamma();
  const double c1 = 1.0 - g1.dot(w1), c2 = 1.0 - g2.dot(w2);
  auto f = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.trace() * b.trace() + 2.0 * (a * b).trace();
  };
  return f(m0, m0) + 2 * c1 * m0.trace() - 2 * c2 * f(m0, m1) + c1 * c1 -
         2 * c1 * c2 * m1.trace() + c2 * c2 * f(m1, m1);
}

struct Scenario {
  KrigingState truth;
  KrigingState model;
  EstimatorMatrix estimator;
};

Scenario misspecified(Eigen::Index n, Method method, std::uint64_t seed) {
  const auto design = srs(n, 2, seed);
  auto truth = fit(design, CorrelationModel::matern({0.4, 0.3}, 2.5));
  auto model = fit(design, CorrelationModel::exponential({0.25, 0.5}));
  auto est = estimator_matrix(method, model);
  return {std::move(truth), std::move(model), std::move(est)};
}

TEST(FPair, IdentityAndZero) {
  for (Eigen::Index n : {1, 4, 9}) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    EXPECT_NEAR(f_pair(id, id), double(n * n + 2 * n), 1e-12);
    EXPECT_EQ(f_pair(Eigen::MatrixXd::Zero(n, n), id), 0.0);
  }
  EXPECT_THROW(f_pair(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 3)), InputError);
}

TEST(FPair, SymmetricAndLinear) {
  const auto a = random_symmetric(6, 1), b = random_symmetric(6, 2), c = random_symmetric(6, 3);
  EXPECT_NEAR(f_pair(a, b), f_pair(b, a), 1e-12);
  EXPECT_NEAR(f_pair(2.0 * a + c, b), 2.0 * f_pair(a, b) + f_pair(c, b), 1e-12);
  EXPECT_NEAR(f_pair(a, b - 3.0 * c), f_pair(a, b) - 3.0 * f_pair(a, c), 1e-12);
}

TEST(FPair, GaussianMomentByMonteCarlo) {
  const auto a = random_symmetric(5, 4), b = random_symmetric(5, 5);
  Rng rng(6);
  const int draws = 1000000;
  double s = 0.0, s2 = 0.0;
  Eigen::VectorXd z(5);
  for (int k = 0; k < draws; ++k) {
    for (int i = 0; i < 5; ++i) z(i) = rng.normal();
    const double v = z.dot(a * z) * z.dot(b * z);
    s += v;
    s2 += v * v;
  }
  const double mean = s / draws;
  const double se = std::sqrt((s2 / draws - mean * mean) / (draws - 1));
  EXPECT_LE(std::abs(mean - f_pair(a, b)), 3.0 * se);
}

TEST(RiskClosedForm, MatchesExplicitMatrices) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Method method = seed % 2 ? Method::CV : Method::ML;
    const auto sc = misspecified(9 + seed, method, seed);
    const auto pt = srs(1, 2, 500 + seed);
    const RiskInputs in{sc.truth, sc.model, sc.estimator, pt.point(0)};
    const double expected = risk_by_matrices(sc.truth, sc.model, sc.estimator.matrix, pt.point(0));
    EXPECT_NEAR(risk_closed_form(in), expected, 1e-10 * std::max(1.0, expected));
    EXPECT_GE(risk_closed_form(in), -1e-10);
  }
}

TEST(RiskClosedForm, WellSpecifiedMlReduction) {
  const auto design = srs(15, 2, 7);
  const auto s = fit(design, CorrelationModel::matern({0.3, 0.5}, 1.5));
  const auto ml = estimator_matrix(Method::ML, s);
  const auto test = srs(20, 2, 8);
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    const auto x0 = test.point(i);
    const double c1 = 1.0 - s.cross(x0).dot(s.solve(s.cross(x0)));
    const RiskInputs in{s, s, ml, x0};
    EXPECT_NEAR(risk_closed_form(in), c1 * c1 * 2.0 / 15.0, 1e-10);
    const auto rep = rtr_btr(in);
    EXPECT_NEAR(rep.btr, 0.0, 1e-10);
    EXPECT_NEAR(rep.rtr, std::sqrt(2.0 / 15.0), 1e-8);
  }
}

TEST(RiskClosedForm, UncorrelatedPoint) {
  const auto sc = misspecified(10, Method::CV, 3);
  const std::vector<double> far{50.0, 50.0};
  const Eigen::MatrixXd m1 = sc.estimator.matrix * sc.truth.gamma();
  const double expected = std::pow(1.0 - m1.trace(), 2) + 2.0 * (m1 * m1).trace();
  EXPECT_NEAR(risk_closed_form({sc.truth, sc.model, sc.estimator, far}), expected, 1e-12);
}

TEST(RiskClosedForm, RejectsMismatchedEstimator) {
  const auto sc = misspecified(6, Method::ML, 1);
  const EstimatorMatrix bad{Method::ML, Eigen::MatrixXd::Identity(5, 5)};
  const std::vector<double> x0{0.5, 0.5};
  EXPECT_THROW(risk_closed_form({sc.truth, sc.model, bad, x0}), InputError);
}

TEST(RiskMonteCarlo, AgreesWithClosedForm) {
  const auto sc = misspecified(12, Method::CV, 11);
  const std::vector<double> x0{0.37, 0.61};
  const RiskInputs in{sc.truth, sc.model, sc.estimator, x0};
  const auto mc = risk_monte_carlo(in, 1000000, 12);
  EXPECT_EQ(mc.draws, 1000000u);
  EXPECT_LE(std::abs(mc.estimate - risk_closed_form(in)), 4.0 * mc.std_error);
}

TEST(RiskMonteCarlo, ZeroEstimatorIsConstant) {
  const auto design = srs(8, 2, 2);
  const auto s = fit(design, CorrelationModel::gaussian({0.3, 0.3}));
  const EstimatorMatrix zero{Method::ML, Eigen::MatrixXd::Zero(8, 8)};
  const std::vector<double> x0{0.2, 0.9};
  const double c1 = 1.0 - s.cross(x0).dot(s.solve(s.cross(x0)));
  const auto mc = risk_monte_carlo({s, s, zero, x0}, 5000, 3);
  EXPECT_NEAR(mc.estimate, c1 * c1, 1e-12);
  EXPECT_NEAR(mc.std_error, 0.0, 1e-12);
}

TEST(RiskMonteCarlo, StandardErrorScaling) {
  const auto sc = misspecified(8, Method::ML, 4);
  const std::vector<double> x0{0.5, 0.5};
  const RiskInputs in{sc.truth, sc.model, sc.estimator, x0};
  const double se1 = risk_monte_carlo(in, 100000, 5).std_error;
  const double se2 = risk_monte_carlo(in, 200000, 5).std_error;
  EXPECT_NEAR(se2 / se1, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(RiskMonteCarlo, DeterministicAndRejectsFewDraws) {
  const auto sc = misspecified(6, Method::CV, 5);
  const std::vector<double> x0{0.1, 0.4};
  const RiskInputs in{sc.truth, sc.model, sc.estimator, x0};
  const auto a = risk_monte_carlo(in, 20000, 9);
  const auto b = risk_monte_carlo(in, 20000, 9);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_THROW(risk_monte_carlo(in, 999, 9), InputError);
}

TEST(RtrBtr, BiasedEstimatorHasUnitBias) {
  const auto s = fit(srs(10, 2, 6), CorrelationModel::exponential({0.5, 0.5}));
  const EstimatorMatrix biased{Method::ML, 2.0 * s.gamma_inv() / 10.0};
  const auto test = srs(10, 2, 7);
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    EXPECT_NEAR(rtr_btr({s, s, biased, test.point(i)}).btr, 1.0, 1e-10);
  }
}

TEST(RtrBtr, DecompositionIdentity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sc = misspecified(10, seed % 2 ? Method::ML : Method::CV, 20 + seed);
    const auto pt = srs(1, 2, 700 + seed);
    const auto rep = rtr_btr({sc.truth, sc.model, sc.estimator, pt.point(0)});
    EXPECT_NEAR(rep.rtr * rep.rtr, rep.btr * rep.btr + rep.relative_variance, 1e-10);
    EXPECT_GE(rep.relative_variance, -1e-10);
    EXPECT_GT(rep.denom, 0.0);
  }
}

TEST(RiskContext, MatchesPerPointReport) {
  const auto sc = misspecified(14, Method::CV, 30);
  const RiskContext ctx(sc.truth, sc.model, sc.estimator);
  const auto test = srs(15, 2, 31);
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    const auto fast = ctx.at(test.point(i));
    const auto slow = rtr_btr({sc.truth, sc.model, sc.estimator, test.point(i)});
    EXPECT_NEAR(fast.risk, slow.risk, 1e-10 * std::max(1.0, slow.risk));
    EXPECT_NEAR(fast.rtr, slow.rtr, 1e-8);
    EXPECT_NEAR(fast.btr, slow.btr, 1e-8);
  }
}

TEST(IntegratedCriteria, SinglePointAndOrdering) {
  const auto sc = misspecified(10, Method::ML, 40);
  const RiskContext ctx(sc.truth, sc.model, sc.estimator);
  const auto one = srs(1, 2, 41);
  const auto ic = integrated_criteria(ctx, one.points);
  const auto rep = ctx.at(one.point(0));
  EXPECT_NEAR(ic.irtr, rep.rtr, 1e-14);
  EXPECT_NEAR(ic.ibtr, rep.btr, 1e-14);
  const auto many = integrated_criteria(ctx, srs(50, 2, 42).points);
  EXPECT_GE(many.irtr, many.ibtr);
  EXPECT_THROW(integrated_criteria(ctx, PointMatrix(0, 2)), InputError);
}

TEST(IntegratedCriteria, WellSpecifiedMl) {
  const auto design = srs(20, 2, 43);
  const auto model = CorrelationModel::matern({0.3, 0.3}, 1.5);
  const auto ic = integrated_criteria(model, model, Method::ML, design, srs(30, 2, 44).points);
  EXPECT_NEAR(ic.irtr, std::sqrt(2.0 / 20.0), 1e-8);
  EXPECT_NEAR(ic.ibtr, 0.0, 1e-8);
}

TEST(IntegratedCriteria, MatchesReference) {
  const auto sc = misspecified(12, Method::CV, 45);
  const auto test = srs(40, 2, 46);
  const auto fast = integrated_criteria(RiskContext(sc.truth, sc.model, sc.estimator), test.points);
  const auto slow = reference::integrated_criteria(sc.truth, sc.model, sc.estimator, test.points);
  EXPECT_NEAR(fast.irtr, slow.irtr, 1e-10);
  EXPECT_NEAR(fast.ibtr, slow.ibtr, 1e-10);
}

}  // namespace
}  // namespace krigmis
