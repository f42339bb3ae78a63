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

#include "krigmis/varest.hpp"

#include "krigmis/error.hpp"

namespace krigmis {

const char* to_string(Method method) { return method == Method::ML ? "ML" : "CV"; }

double sigma2_ml(const KrigingState& state, const Eigen::VectorXd& y) {
  if (y.size() != state.size()) throw InputError("observation vector length mismatch");
  return y.dot(state.solve(y)) / static_cast<double>(state.size());
}

double sigma2_cv(const KrigingState& state, const Eigen::VectorXd& y) {
  const LooResult loo = loo_virtual(state, y);
  return (loo.residuals.array().square() / loo.variances.array()).mean();
}

double sigma2(Method method, const KrigingState& state, const Eigen::VectorXd& y) {
  return method == Method::ML ? sigma2_ml(state, y) : sigma2_cv(state, y);
}

EstimatorMatrix estimator_matrix(Method kind, const KrigingState& state) {
  const Eigen::MatrixXd& inv = state.gamma_inv();
  const double n = static_cast<double>(state.size());
  if (kind == Method::ML) return {kind, inv / n};
  if (state.size() < 2) throw InputError("CV estimator needs at least two points");
  const Eigen::VectorXd scale = inv.diagonal().cwiseInverse();
  Eigen::MatrixXd m = inv * scale.asDiagonal() * inv / n;
  m = 0.5 * (m + m.transpose()).eval();
  return {kind, std::move(m)};
}

double quadratic_form_mean(const Eigen::MatrixXd& m, const Eigen::MatrixXd& gamma) {
  return (m.cwiseProduct(gamma.transpose())).sum();
}

double quadratic_form_variance(const Eigen::MatrixXd& m, const Eigen::MatrixXd& gamma) {
  const Eigen::MatrixXd mg = m * gamma;
  return 2.0 * mg.cwiseProduct(mg.transpose()).sum();
}

double var_sigma2_cv_from_inverse(const Eigen::MatrixXd& gamma_inv) {
  const Eigen::Index n = gamma_inv.rows();
  const Eigen::VectorXd d = gamma_inv.diagonal();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = gamma_inv(i, j);
      sum += a * a / (d(i) * d(j));
    }
  }
  const double nn = static_cast<double>(n);
  return 2.0 * sum / (nn * nn);
}

double var_sigma2_well_specified(Method kind, const KrigingState& true_state) {
  if (kind == Method::ML) {
    return quadratic_form_variance(estimator_matrix(Method::ML, true_state).matrix,
                                   true_state.gamma());
  }
  return var_sigma2_cv_from_inverse(true_state.gamma_inv());
}

Eigen::MatrixXd equicorrelation_matrix(Eigen::Index n, double eps) {
  if (n < 2) throw InputError("equicorrelation matrix needs n >= 2");
  if (!(eps >= 0.0 && eps < 1.0)) throw InputError("eps must lie in [0, 1)");
  const double m = static_cast<double>(n - 1);
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(n, n, -eps / m);
  g.diagonal().array() += (m + eps) / m;
  return g;
}

double equicorrelation_cv_variance(Eigen::Index n, double eps) {
  const double nn = static_cast<double>(n);
  const double den = eps + (nn - 1.0) * (1.0 - eps);
  return 2.0 / nn + (2.0 * (nn - 1.0) / nn) * eps * eps / (den * den);
}

double c_loo(const KrigingState& state, const Eigen::VectorXd& y, double sigma2) {
  if (!(sigma2 > 0.0)) throw InputError("c_loo needs a positive variance");
  const LooResult loo = loo_virtual(state, y);
  return (loo.residuals.array().square() / (sigma2 * loo.variances.array())).mean();
}

double c_loo_mean_well_specified(const KrigingState& state) {
  return quadratic_form_mean(estimator_matrix(Method::CV, state).matrix, state.gamma());
}

double c_loo_variance_well_specified(const KrigingState& state) {
  const Eigen::MatrixXd& inv = state.gamma_inv();
  const Eigen::MatrixXd p = inv * inv.diagonal().cwiseInverse().asDiagonal();
  const double n = static_cast<double>(state.size());
  return 2.0 * p.cwiseProduct(p.transpose()).sum() / (n * n);
}

}  // namespace krigmis
