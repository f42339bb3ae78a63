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
#include "krigmis/varest.hpp"
#include "test_util.hpp"

namespace krigmis {
namespace {

using testing::gaussian_sample;
using testing::random_correlation;
using testing::random_vector;

Design regular_grid(Eigen::Index n, double delta) {
  PointMatrix p(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) p(i, 0) = (i + 1) * delta;
  return Design::custom(p);
}

/// (1/n) sum_i ((G^{-1} y)_i / (G^{-1})_ii)^2 (G^{-1})_ii from an LU inverse.
double cv_by_sum(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd inv = gamma.partialPivLu().inverse();
  const Eigen::VectorXd a = inv * y;
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += a(i) * a(i) / inv(i, i);
  return s / y.size();
}

TEST(Sigma2, ZeroData) {
  const auto s = fit(srs(6, 2, 1), CorrelationModel::gaussian({0.3, 0.3}));
  EXPECT_EQ(sigma2_ml(s, Eigen::VectorXd::Zero(6)), 0.0);
  EXPECT_EQ(sigma2_cv(s, Eigen::VectorXd::Zero(6)), 0.0);
}

TEST(Sigma2, IdentityCorrelation) {
  PointMatrix p(4, 1);
  p << 0.0, 0.3, 0.6, 0.9;
  const auto s = fit(Design::custom(p), CorrelationModel::exponential({1e-3}), Nugget(0.0));
  Eigen::VectorXd y(4);
  y << 1.0, -2.0, 0.5, 3.0;
  EXPECT_NEAR(sigma2_ml(s, y), y.squaredNorm() / 4.0, 1e-14);
  EXPECT_NEAR(sigma2_cv(s, y), y.squaredNorm() / 4.0, 1e-14);
  const auto m = estimator_matrix(Method::ML, s);
  EXPECT_LE((m.matrix - Eigen::MatrixXd::Identity(4, 4) / 4.0).norm(), 1e-15);
}

TEST(Sigma2, MlUnbiasedWellSpecified) {
  const auto s = fit(srs(20, 2, 3), CorrelationModel::matern({0.3, 0.3}, 1.5));
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 10000; ++k) sum += sigma2_ml(s, gaussian_sample(s.gamma(), k));
  EXPECT_LE(std::abs(sum / 10000.0 - 1.0), 3.0 * std::sqrt(2.0 / 20.0) / 100.0);
}

TEST(Sigma2, CvSumAndMatrixFormsAgree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = fit(srs(9, 2, seed), CorrelationModel::exponential({0.4, 0.7}));
    const auto y = random_vector(9, 100 + seed);
    const double direct = cv_by_sum(s.gamma(), y);
    EXPECT_NEAR(sigma2_cv(s, y), direct, 1e-10 * direct);
    const auto m = estimator_matrix(Method::CV, s);
    EXPECT_NEAR(m.apply(y), direct, 1e-10 * direct);
  }
}

TEST(Sigma2, CvSymmetricPair) {
  PointMatrix p(2, 1);
  p << 0.3, 0.7;
  const auto s = fit(Design::custom(p), CorrelationModel::gaussian({0.5}));
  Eigen::VectorXd y(2);
  y << 0.8, -0.8;
  const auto loo = loo_virtual(s, y);
  EXPECT_NEAR(loo.residuals(0) * loo.residuals(0) / loo.variances(0),
              loo.residuals(1) * loo.residuals(1) / loo.variances(1), 1e-12);
  EXPECT_NEAR(sigma2_cv(s, y), loo.residuals(0) * loo.residuals(0) / loo.variances(0), 1e-12);
}

TEST(EstimatorMatrix, ReproducesEstimators) {
  const auto s = fit(srs(12, 3, 5), CorrelationModel::matern({0.5, 0.4, 0.8}, 2.2));
  const auto ml = estimator_matrix(Method::ML, s);
  const auto cv = estimator_matrix(Method::CV, s);
  EXPECT_EQ(ml.kind, Method::ML);
  EXPECT_EQ(cv.kind, Method::CV);
  EXPECT_LE((cv.matrix - cv.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto y = random_vector(12, k);
    EXPECT_NEAR(ml.apply(y), sigma2_ml(s, y), 1e-10 * sigma2_ml(s, y));
    EXPECT_NEAR(cv.apply(y), sigma2_cv(s, y), 1e-10 * sigma2_cv(s, y));
  }
}

TEST(EstimatorMatrix, WellSpecifiedTraceIsOne) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = KrigingState::from_matrix(random_correlation(15, seed));
    for (Method m : {Method::ML, Method::CV}) {
      EXPECT_NEAR((estimator_matrix(m, s).matrix * s.gamma()).trace(), 1.0, 1e-10);
      EXPECT_NEAR(quadratic_form_mean(estimator_matrix(m, s).matrix, s.gamma()), 1.0, 1e-10);
    }
  }
}

TEST(QuadraticForm, MomentsMatchMonteCarlo) {
  const Eigen::MatrixXd g = random_correlation(6, 3);
  const Eigen::MatrixXd a = random_correlation(6, 4) - 0.5 * Eigen::MatrixXd::Identity(6, 6);
  const double mean = quadratic_form_mean(a, g);
  const double var = quadratic_form_variance(a, g);
  const Eigen::MatrixXd l = g.llt().matrixL();
  Rng rng(5);
  const int draws = 200000;
  double s = 0.0, s2 = 0.0;
  Eigen::VectorXd z(6);
  for (int k = 0; k < draws; ++k) {
    for (int i = 0; i < 6; ++i) z(i) = rng.normal();
    const Eigen::VectorXd y = l * z;
    const double q = y.dot(a * y);
    s += q;
    s2 += q * q;
  }
  const double emp_mean = s / draws;
  const double emp_var = s2 / draws - emp_mean * emp_mean;
  EXPECT_LE(std::abs(emp_mean - mean), 4.0 * std::sqrt(var / draws));
  EXPECT_NEAR(emp_var / var, 1.0, 0.05);
}

TEST(VarianceWellSpecified, MlIsCramerRao) {
  for (Eigen::Index n : {5, 20, 100}) {
    const auto s = fit(srs(n, 2, 7), CorrelationModel::matern({0.3, 0.3}, 1.5), Nugget(1e-6));
    EXPECT_NEAR(var_sigma2_well_specified(Method::ML, s), 2.0 / n, 1e-10);
  }
}

TEST(VarianceWellSpecified, CvIdentityIsCramerRao) {
  const auto s = KrigingState::from_matrix(Eigen::MatrixXd::Identity(7, 7));
  EXPECT_NEAR(var_sigma2_well_specified(Method::CV, s), 2.0 / 7.0, 1e-15);
}

TEST(VarianceWellSpecified, CvAboveBoundAndMatchesQuadraticForm) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = KrigingState::from_matrix(random_correlation(10, 50 + seed));
    const double v = var_sigma2_well_specified(Method::CV, s);
    EXPECT_GE(v, 2.0 / 10.0 - 1e-12);
    EXPECT_NEAR(v, quadratic_form_variance(estimator_matrix(Method::CV, s).matrix, s.gamma()),
                1e-10);
  }
}

TEST(Equicorrelation, ClosedFormVariance) {
  const Eigen::Index n = 10;
  const double eps = 0.3;
  const Eigen::MatrixXd g = equicorrelation_matrix(n, eps);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double expected = (i == j ? (n - 1 + eps) / (n - 1) : 0.0) - eps / (n - 1);
      EXPECT_NEAR(g(i, j), expected, 1e-15);
    }
  }
  const double den = eps + (n - 1) * (1 - eps);
  const double closed = 2.0 / n + (2.0 * (n - 1) / n) * eps * eps / (den * den);
  EXPECT_NEAR(var_sigma2_well_specified(Method::CV, KrigingState::from_matrix(g)), closed, 1e-8);
  EXPECT_NEAR(equicorrelation_cv_variance(n, eps), closed, 1e-15);
}

TEST(Equicorrelation, RejectsBadParameters) {
  EXPECT_THROW(equicorrelation_matrix(1, 0.3), InputError);
  EXPECT_THROW(equicorrelation_matrix(5, 1.0), InputError);
}

TEST(CLoo, DefinitionalValues) {
  const auto s = fit(srs(10, 2, 8), CorrelationModel::exponential({0.5, 0.5}));
  const auto y = random_vector(10, 9);
  EXPECT_NEAR(c_loo(s, y, sigma2_cv(s, y)), 1.0, 1e-14);
  EXPECT_NEAR(c_loo(s, y, 2.0), sigma2_cv(s, y) / 2.0, 1e-14);
  EXPECT_EQ(c_loo(s, Eigen::VectorXd::Zero(10), 1.0), 0.0);
  EXPECT_THROW(c_loo(s, y, 0.0), InputError);
}

TEST(CLoo, MonteCarloMeanIsOne) {
  const auto s = fit(regular_grid(9, 0.1), CorrelationModel::matern({0.3}, 1.5));
  double sum = 0.0, sum_sq = 0.0;
  const int draws = 2000;
  for (int k = 0; k < draws; ++k) {
    const double c = c_loo(s, gaussian_sample(s.gamma(), 1000 + k), 1.0);
    sum += c;
    sum_sq += c * c;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / (draws - 1));
  EXPECT_LE(std::abs(mean - 1.0), 3.0 * se);
}

TEST(CLoo, TraceMeanAndShrinkingVariance) {
  const double delta = 1.0 / 32.0;
  const auto model = CorrelationModel::matern({0.1}, 1.5);
  const auto s10 = fit(regular_grid(10, delta), model);
  const auto s40 = fit(regular_grid(40, delta), model);
  EXPECT_NEAR(c_loo_mean_well_specified(s10), 1.0, 1e-10);
  EXPECT_NEAR(c_loo_mean_well_specified(s40), 1.0, 1e-10);
  EXPECT_LT(c_loo_variance_well_specified(s40), c_loo_variance_well_specified(s10));
  EXPECT_NEAR(c_loo_variance_well_specified(s10), var_sigma2_well_specified(Method::CV, s10),
              1e-12);
}

}  // namespace
}  // namespace krigmis
