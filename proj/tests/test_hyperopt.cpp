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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "krigmis/error.hpp"
#include "krigmis/hyperopt.hpp"
#include "test_util.hpp"

namespace krigmis {
namespace {

using testing::random_vector;

/// Gamma assembled entry by entry and factored with a pivoted LU.
Eigen::MatrixXd gamma_of(const CorrelationModel& m, const Design& d, double tau2) {
  const Eigen::Index n = d.size();
  Eigen::MatrixXd g(n, n);
  std::vector<double> h(d.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < d.dim(); ++k) h[k] = d.points(i, k) - d.points(j, k);
      g(i, j) = correlation(m, h);
    }
  }
  g.diagonal().array() += tau2;
  return g;
}

Eigen::VectorXd random_theta(const HyperParamSpace& space, Rng& rng, double margin) {
  const Eigen::VectorXd lo = space.lower(), hi = space.upper();
  Eigen::VectorXd t(lo.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double a = lo(i) + margin * (hi(i) - lo(i)), b = hi(i) - margin * (hi(i) - lo(i));
    t(i) = a + (b - a) * rng.uniform();
  }
  return t;
}

Eigen::VectorXd simulate(const CorrelationModel& model, const Design& design, std::uint64_t seed) {
  return testing::gaussian_sample(gamma_of(model, design, 1e-8), seed);
}

TEST(ObjectiveMl, IdentityCorrelation) {
  PointMatrix p(3, 1);
  p << 0.0, 0.5, 1.0;
  const Design d = Design::custom(p);
  Eigen::VectorXd y(3);
  y << 1.0, 2.0, -0.5;
  const double tau2 = 1e-8;
  EXPECT_NEAR(f_ml(CorrelationModel::exponential({1e-3}), d, y, Nugget(tau2)),
              std::log(y.squaredNorm() / (1.0 + tau2)) + std::log(1.0 + tau2), 1e-12);
}

TEST(ObjectiveMl, HandBuiltCase) {
  const auto d = srs(5, 2, 3);
  const auto m = CorrelationModel::matern({0.4, 0.6}, 1.5);
  const auto y = random_vector(5, 4);
  const Eigen::MatrixXd g = gamma_of(m, d, 1e-8);
  const auto lu = g.partialPivLu();
  const double logdet = std::log(lu.determinant());
  EXPECT_NEAR(f_ml(m, d, y), logdet / 5.0 + std::log(y.dot(lu.solve(y))), 1e-12);
}

TEST(ObjectiveMl, ScalingShiftsByLogSquare) {
  const auto d = srs(8, 2, 5);
  const auto m = CorrelationModel::gaussian({0.5, 0.3});
  const auto y = random_vector(8, 6);
  EXPECT_NEAR(f_ml(m, d, -3.0 * y), f_ml(m, d, y) + 2.0 * std::log(3.0), 1e-12);
}

TEST(ObjectiveCv, ZeroDataAndLooSum) {
  const auto d = srs(9, 2, 7);
  const auto m = CorrelationModel::exponential({0.3, 0.8});
  EXPECT_EQ(f_cv(m, d, Eigen::VectorXd::Zero(9)), 0.0);
  const auto y = random_vector(9, 8);
  const auto loo = loo_virtual(fit(d, m), y);
  EXPECT_NEAR(f_cv(m, d, y), loo.residuals.squaredNorm(), 1e-10 * loo.residuals.squaredNorm());
  const Eigen::MatrixXd inv = gamma_of(m, d, 1e-8).partialPivLu().inverse();
  const Eigen::VectorXd a = inv * y;
  const double direct = (a.array() / inv.diagonal().array()).square().sum();
  EXPECT_NEAR(f_cv(m, d, y), direct, 1e-10 * direct);
  EXPECT_NEAR(f_cv(m, d, 2.5 * y), 6.25 * f_cv(m, d, y), 1e-12 * f_cv(m, d, 2.5 * y));
}

struct GradientCase {
  const char* name;
  HyperParamSpace space;
};

class GradientSuite : public ::testing::TestWithParam<int> {};

std::vector<GradientCase> gradient_cases() {
  return {{"exponential", HyperParamSpace::exponential(2, LengthMode::Anisotropic)},
          {"gaussian", HyperParamSpace::gaussian(2, LengthMode::Anisotropic)},
          {"matern", HyperParamSpace::matern(2, LengthMode::Anisotropic)},
          {"matern_iso", HyperParamSpace::matern(3, LengthMode::Isotropic)},
          {"power_exponential", [] {
             auto s = HyperParamSpace::exponential(2, LengthMode::Anisotropic);
             s.shape_bounds = Interval{0.5, 1.9};
             return s;
           }()}};
}

Eigen::VectorXd objective_fd(Method method, const HyperParamSpace& space,
                             const Eigen::VectorXd& theta, const Design& design,
                             const Eigen::VectorXd& y, double tau2, bool penalize) {
  return testing::objective_fd_ld(method == Method::ML, space.family,
                                  space.length_mode == LengthMode::Isotropic, space.dim,
                                  space.shape_free(), space.fixed_shape, theta, design.points, y,
                                  tau2, penalize);
}

TEST_P(GradientSuite, MatchesFiniteDifferences) {
  const auto c = gradient_cases()[GetParam()];
  const auto design = srs(12, c.space.dim, 10 + GetParam());
  Rng rng(20 + GetParam());
  for (int trial = 0; trial < 20; ++trial) {
    const auto theta = random_theta(c.space, rng, 0.05);
    const auto y = simulate(c.space.to_model(theta), design, 100 + trial);
    for (Method method : {Method::ML, Method::CV}) {
      const auto ev = evaluate_objective(method, c.space, theta, design, y, Nugget(), false);
      const Eigen::VectorXd g = method == Method::ML ? grad_f_ml(c.space, theta, design, y)
                                                     : grad_f_cv(c.space, theta, design, y);
      EXPECT_LE((g - ev.gradient).norm(), 1e-12 * g.norm());
      const Eigen::VectorXd fd = objective_fd(method, c.space, theta, design, y, ev.nugget, false);
      EXPECT_LE(testing::relative_error(g, fd), 1e-5)
          << c.name << " " << to_string(method) << " trial " << trial;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Families, GradientSuite, ::testing::Range(0, 5));

TEST(Gradient, CollapsedCoordinateHasZeroComponent) {
  PointMatrix p(10, 2);
  for (int i = 0; i < 10; ++i) {
    p(i, 0) = (i + 0.5) / 10.0;
    p(i, 1) = 0.5;
  }
  const Design d = Design::custom(p);
  const auto space = HyperParamSpace::gaussian(2, LengthMode::Anisotropic);
  Eigen::VectorXd theta(2);
  theta << std::log(0.3), std::log(0.7);
  const auto y = random_vector(10, 1);
  EXPECT_EQ(grad_f_ml(space, theta, d, y)(1), 0.0);
  EXPECT_EQ(grad_f_cv(space, theta, d, y)(1), 0.0);
}

TEST(Gradient, PenalizedObjectiveMatchesFiniteDifferences) {
  const auto space = HyperParamSpace::gaussian(1, LengthMode::Isotropic);
  const auto design = srs(12, 1, 31);
  const auto y = random_vector(12, 32);
  Eigen::VectorXd theta(1);
  theta << std::log(0.8);
  const Nugget nugget(1e-8);
  const auto eval = evaluate_objective(Method::CV, space, theta, design, y, nugget, true);
  ASSERT_GT(eval.penalty, 0.0);
  EXPECT_EQ(eval.nugget, 1e-8);
  const Eigen::VectorXd fd = objective_fd(Method::CV, space, theta, design, y, 1e-8, true);
  EXPECT_LE(testing::relative_error(eval.gradient, fd), 1e-5);
  const auto plain = evaluate_objective(Method::CV, space, theta, design, y, nugget, false);
  EXPECT_NEAR(eval.value, plain.value + eval.penalty, 1e-9 * eval.value);
}

TEST(CvPenalty, HingeValues) {
  Eigen::VectorXd y(4);
  y << 1.0, -1.0, 2.0, 0.0;
  const auto p = CvPenalty::for_data(y);
  const double v = y.squaredNorm() / 4.0;
  EXPECT_DOUBLE_EQ(p.threshold, 1000.0 * v);
  EXPECT_DOUBLE_EQ(p.stiffness, 1e-6 / (v * v));
  EXPECT_EQ(p.value(0.5 * p.threshold), 0.0);
  EXPECT_EQ(p.slope(0.5 * p.threshold), 0.0);
  EXPECT_DOUBLE_EQ(p.value(p.threshold + 2.0), 4.0 * p.stiffness);
  EXPECT_DOUBLE_EQ(p.slope(p.threshold + 2.0), 4.0 * p.stiffness);
}

TEST(PenaltyApplies, ModesAndFamilies) {
  const auto exp = HyperParamSpace::exponential(2, LengthMode::Isotropic);
  const auto gauss = HyperParamSpace::gaussian(2, LengthMode::Isotropic);
  const auto mat = HyperParamSpace::matern(2, LengthMode::Isotropic);
  const auto mat_fixed = HyperParamSpace::matern_fixed(2, LengthMode::Isotropic, 2.5);
  EXPECT_FALSE(penalty_applies(Method::CV, exp, PenaltyMode::Auto));
  EXPECT_TRUE(penalty_applies(Method::CV, gauss, PenaltyMode::Auto));
  EXPECT_TRUE(penalty_applies(Method::CV, mat, PenaltyMode::Auto));
  EXPECT_FALSE(penalty_applies(Method::CV, mat_fixed, PenaltyMode::Auto));
  EXPECT_FALSE(penalty_applies(Method::ML, gauss, PenaltyMode::Auto));
  EXPECT_FALSE(penalty_applies(Method::ML, gauss, PenaltyMode::On));
  EXPECT_TRUE(penalty_applies(Method::CV, exp, PenaltyMode::On));
  EXPECT_FALSE(penalty_applies(Method::CV, gauss, PenaltyMode::Off));
}

TEST(HyperParamSpace, ModelRoundTripAndValidation) {
  const auto space = HyperParamSpace::matern(3, LengthMode::Anisotropic);
  EXPECT_EQ(space.num_free(), 4u);
  Eigen::VectorXd theta(4);
  theta << std::log(0.2), std::log(1.0), std::log(3.0), 2.2;
  const auto m = space.to_model(theta);
  EXPECT_EQ(m.family(), Family::Matern);
  EXPECT_NEAR(m.lengths()[0], 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(m.shape(), 2.2);
  EXPECT_LE((space.from_model(m) - theta).norm(), 1e-14);

  const auto iso = HyperParamSpace::exponential(4, LengthMode::Isotropic);
  EXPECT_EQ(iso.num_free(), 1u);
  EXPECT_EQ(iso.to_model(Eigen::VectorXd::Constant(1, 0.0)).lengths(), std::vector<double>(4, 1.0));

  auto bad = space;
  bad.log_length_bounds = {1.0, 1.0};
  EXPECT_THROW(bad.validate(), InputError);
}

TEST(Estimate, FirstOrderConditionAtInteriorOptimum) {
  const auto space = HyperParamSpace::matern_fixed(1, LengthMode::Isotropic, 2.5);
  const auto design = lhs_maximin(30, 1, 3, 100);
  const auto y = simulate(CorrelationModel::matern({0.25}, 2.5), design, 4);
  for (Method method : {Method::ML, Method::CV}) {
    OptimizerConfig cfg;
    cfg.seed = 5;
    const auto r = estimate(method, design, y, space, cfg);
    ASSERT_GT(r.theta_vector(0), space.lower()(0) + 0.1);
    ASSERT_LT(r.theta_vector(0), space.upper()(0) - 0.1);
    const auto ev = evaluate_objective(method, space, r.theta_vector, design, y, cfg.nugget, false);
    EXPECT_LE(std::abs(ev.gradient(0)), 1e-4 * std::max(1.0, std::abs(ev.value)))
        << to_string(method);
  }
}

TEST(Estimate, RecoversLengthFromSimulatedData) {
  const double true_log = std::log(0.2);
  const auto truth = CorrelationModel::matern({0.2}, 2.5);
  const auto space = HyperParamSpace::matern_fixed(1, LengthMode::Isotropic, 2.5);
  for (Method method : {Method::ML, Method::CV}) {
    std::vector<double> errors;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto design = srs(80, 1, 200 + seed);
      const auto y = simulate(truth, design, 300 + seed);
      OptimizerConfig cfg;
      cfg.seed = seed;
      const auto r = estimate(method, design, y, space, cfg);
      errors.push_back(std::abs(std::log(r.theta_hat.lengths()[0]) - true_log));
    }
    std::nth_element(errors.begin(), errors.begin() + 5, errors.end());
    EXPECT_LE(errors[5], 0.5) << to_string(method);
  }
}

TEST(Estimate, DescentBoxAndReEvaluation) {
  const auto space = HyperParamSpace::matern(2, LengthMode::Anisotropic);
  const auto design = lhs_maximin(25, 2, 6, 100);
  const auto y = simulate(CorrelationModel::matern({0.3, 0.6}, 1.5), design, 7);
  for (Method method : {Method::ML, Method::CV}) {
    OptimizerConfig cfg;
    cfg.seed = 8;
    cfg.starts = 5;
    const auto r = estimate(method, design, y, space, cfg);
    EXPECT_EQ(r.starts, 5);
    EXPECT_EQ(r.diagnostics.size(), 5u);
    for (const auto& s : r.diagnostics) {
      if (!s.failed) {
        EXPECT_LE(r.objective, s.start_value);
        EXPECT_LE(s.value, s.start_value);
      }
    }
    const Eigen::VectorXd lo = space.lower(), hi = space.upper();
    for (Eigen::Index i = 0; i < r.theta_vector.size(); ++i) {
      EXPECT_GE(r.theta_vector(i), lo(i));
      EXPECT_LE(r.theta_vector(i), hi(i));
    }
    const bool pen = penalty_applies(method, space, cfg.penalty);
    EXPECT_EQ(r.penalty_active, pen);
    const auto ev = evaluate_objective(method, space, r.theta_vector, design, y, cfg.nugget, pen);
    EXPECT_NEAR(r.objective, ev.value, 1e-8 * std::max(1.0, std::abs(ev.value)));
    const auto state = fit(design, r.theta_hat, Nugget(r.nugget));
    EXPECT_NEAR(r.sigma2_hat, sigma2(method, state, y), 1e-10 * r.sigma2_hat);
  }
}

TEST(Estimate, ScalingInvariance) {
  const auto space = HyperParamSpace::exponential(2, LengthMode::Anisotropic);
  const auto design = lhs_maximin(30, 2, 9, 100);
  const auto y = simulate(CorrelationModel::exponential({0.4, 0.2}), design, 10);
  for (Method method : {Method::ML, Method::CV}) {
    OptimizerConfig cfg;
    cfg.seed = 11;
    cfg.tolerance = 1e-8;
    const auto a = estimate(method, design, y, space, cfg);
    const auto b = estimate(method, design, 3.0 * y, space, cfg);
    EXPECT_LE((a.theta_vector - b.theta_vector).cwiseAbs().maxCoeff(), 1e-3) << to_string(method);
    EXPECT_NEAR(b.sigma2_hat / a.sigma2_hat, 9.0, 9.0 * 1e-3) << to_string(method);
  }
}

TEST(Estimate, Deterministic) {
  const auto space = HyperParamSpace::gaussian(2, LengthMode::Isotropic);
  const auto design = srs(20, 2, 12);
  const auto y = random_vector(20, 13);
  OptimizerConfig cfg;
  cfg.seed = 14;
  const auto a = estimate(Method::CV, design, y, space, cfg);
  const auto b = estimate(Method::CV, design, y, space, cfg);
  EXPECT_EQ(a.theta_vector, b.theta_vector);
  EXPECT_EQ(a.sigma2_hat, b.sigma2_hat);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.converged_starts, b.converged_starts);
}

TEST(Estimate, RejectsBadInputs) {
  const auto space = HyperParamSpace::exponential(2, LengthMode::Isotropic);
  OptimizerConfig cfg;
  EXPECT_THROW(estimate(Method::ML, srs(2, 2, 1), Eigen::VectorXd::Ones(2), space, cfg),
               InputError);
  EXPECT_THROW(estimate(Method::ML, srs(5, 3, 1), Eigen::VectorXd::Ones(5), space, cfg),
               InputError);
  EXPECT_THROW(estimate(Method::ML, srs(5, 2, 1), Eigen::VectorXd::Ones(4), space, cfg),
               InputError);
}

}  // namespace
}  // namespace krigmis
