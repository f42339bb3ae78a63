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

#include "krigmis/krig.hpp"

#include <cmath>

#include "krigmis/error.hpp"

namespace krigmis {

KrigingState::KrigingState(std::optional<Design> design,
                           std::optional<CorrelationModel> model,
                           RegularizedCorrelation factor)
    : design_(std::move(design)),
      model_(std::move(model)),
      nugget_(factor.nugget),
      gamma_(std::move(factor.matrix)),
      chol_(std::move(factor.cholesky)) {
  const Eigen::Index n = gamma_.rows();
  gamma_inv_ = chol_.solve(Eigen::MatrixXd::Identity(n, n));
  gamma_inv_ = 0.5 * (gamma_inv_ + gamma_inv_.transpose()).eval();
  const Eigen::MatrixXd& lu = chol_.matrixLLT();
  logdet_ = 2.0 * lu.diagonal().array().log().sum();
}

KrigingState KrigingState::fit(const Design& design, const CorrelationModel& model,
                               const Nugget& nugget) {
  return KrigingState(design, model, corr_matrix(model, design, nugget));
}

KrigingState KrigingState::from_matrix(Eigen::MatrixXd gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0) {
    throw InputError("correlation matrix must be square and nonempty");
  }
  RegularizedCorrelation factor;
  factor.cholesky.compute(gamma);
  if (factor.cholesky.info() != Eigen::Success) {
    throw ConditioningError("correlation matrix is not positive definite", 0.0);
  }
  factor.matrix = std::move(gamma);
  return KrigingState(std::nullopt, std::nullopt, std::move(factor));
}

const Design& KrigingState::design() const {
  if (!design_) throw InputError("kriging state has no design");
  return *design_;
}

const CorrelationModel& KrigingState::model() const {
  if (!model_) throw InputError("kriging state has no correlation model");
  return *model_;
}

Eigen::VectorXd KrigingState::cross(std::span<const double> x0) const {
  return cross_correlation(model(), design().points, x0);
}

namespace {

void check_length(const KrigingState& state, const Eigen::VectorXd& y) {
  if (y.size() != state.size()) {
    throw InputError("observation vector length does not match the design");
  }
}

}  // namespace

double predict_mean(const KrigingState& state, const Eigen::VectorXd& y,
                    std::span<const double> x0) {
  check_length(state, y);
  return state.cross(x0).dot(state.solve(y));
}

double predictive_variance_factor(const KrigingState& state,
                                  std::span<const double> x0) {
  Eigen::VectorXd v = state.cross(x0);
  state.cholesky().matrixL().solveInPlace(v);
  return 1.0 - v.squaredNorm();
}

BatchPrediction predict_batch(const KrigingState& state, const Eigen::VectorXd& y,
                              const PointMatrix& points) {
  check_length(state, y);
  const Eigen::Index m = points.rows();
  const Eigen::Index n = state.size();
  Eigen::MatrixXd cross(n, m);
  const auto& model = state.model();
  const auto& design = state.design().points;
  if (points.cols() != design.cols()) {
    throw InputError("prediction points dimension does not match the design");
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index t = 0; t < m; ++t) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cross(j, t) = model.between(design.row(j).data(), points.row(t).data());
    }
  }
  BatchPrediction out;
  out.mean = cross.transpose() * state.solve(y);
  state.cholesky().matrixL().solveInPlace(cross);
  out.variance_factor =
      Eigen::VectorXd::Ones(m) - cross.colwise().squaredNorm().transpose();
  return out;
}

void require_same_design(const KrigingState& a, const KrigingState& b) {
  const auto& pa = a.design().points;
  const auto& pb = b.design().points;
  if (pa.rows() != pb.rows() || pa.cols() != pb.cols() || pa != pb) {
    throw InputError("kriging states were fitted on different designs");
  }
}

double conditional_mse(const KrigingState& true_state,
                       const KrigingState& model_state, const Eigen::VectorXd& y,
                       std::span<const double> x0) {
  require_same_design(true_state, model_state);
  check_length(true_state, y);
  const Eigen::VectorXd g1 = true_state.cross(x0);
  const Eigen::VectorXd g2 = model_state.cross(x0);
  const double diff = g1.dot(true_state.solve(y)) - g2.dot(model_state.solve(y));
  return diff * diff + 1.0 - g1.dot(true_state.solve(g1));
}

LooResult loo_virtual(const KrigingState& state, const Eigen::VectorXd& y) {
  if (state.size() < 2) throw InputError("leave-one-out needs at least two points");
  check_length(state, y);
  const Eigen::MatrixXd& inv = state.gamma_inv();
  const Eigen::VectorXd diag = inv.diagonal();
  LooResult out;
  out.variances = diag.cwiseInverse();
  out.residuals = (inv * y).cwiseQuotient(diag);
  return out;
}

}  // namespace krigmis
