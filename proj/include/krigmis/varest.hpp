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

#pragma once

#include <Eigen/Dense>

#include "krigmis/krig.hpp"

namespace krigmis {

enum class Method { ML, CV };

const char* to_string(Method method);

/// sigma2_hat = y' M y.
struct EstimatorMatrix {
  Method kind;
  Eigen::MatrixXd matrix;

  double apply(const Eigen::VectorXd& y) const { return y.dot(matrix * y); }
};

/// (1/n) y' Gamma^{-1} y.
double sigma2_ml(const KrigingState& state, const Eigen::VectorXd& y);

/// (1/n) sum_i (y_i - yhat_{i,-i})^2 / c^2_{i,-i}.
double sigma2_cv(const KrigingState& state, const Eigen::VectorXd& y);

double sigma2(Method method, const KrigingState& state, const Eigen::VectorXd& y);

/// ML: Gamma^{-1} / n. CV: (1/n) Gamma^{-1} diag(Gamma^{-1})^{-1} Gamma^{-1}.
EstimatorMatrix estimator_matrix(Method kind, const KrigingState& state);

/// E[y' M y] = tr(M Gamma) for y ~ N(0, Gamma).
double quadratic_form_mean(const Eigen::MatrixXd& m, const Eigen::MatrixXd& gamma);

/// var(y' M y) = 2 tr((M Gamma)^2) for symmetric M and y ~ N(0, Gamma).
double quadratic_form_variance(const Eigen::MatrixXd& m, const Eigen::MatrixXd& gamma);

/// var_1(sigma2_hat) when the model correlation is the truth. ML evaluates the
/// generic quadratic-form variance (2/n up to rounding); CV uses
/// (2/n^2) sum_ij (G^-1)_ij^2 / ((G^-1)_ii (G^-1)_jj).
double var_sigma2_well_specified(Method kind, const KrigingState& true_state);

/// The CV double sum above for an explicit inverse correlation matrix.
double var_sigma2_cv_from_inverse(const Eigen::MatrixXd& gamma_inv);

/// ((n-1+eps)/(n-1)) I - (eps/(n-1)) J, SPD for 0 <= eps < 1.
Eigen::MatrixXd equicorrelation_matrix(Eigen::Index n, double eps);

/// Closed form of var_1(sigma2_cv) for equicorrelation_matrix(n, eps):
/// 2/n + (2(n-1)/n) eps^2 / (eps + (n-1)(1-eps))^2.
double equicorrelation_cv_variance(Eigen::Index n, double eps);

/// C_LOO = (1/n) sum_i (y_i - yhat_{i,-i})^2 / (sigma2 c^2_{i,-i}).
double c_loo(const KrigingState& state, const Eigen::VectorXd& y, double sigma2);

/// E[C_LOO] under the well-specified model at sigma2 = 1 (equals 1).
double c_loo_mean_well_specified(const KrigingState& state);

/// var[C_LOO] = (2/n^2) tr((G^-1 diag(G^-1)^-1)^2) under the well-specified model.
double c_loo_variance_well_specified(const KrigingState& state);

}  // namespace krigmis
