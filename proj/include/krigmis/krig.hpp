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

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "krigmis/corr.hpp"
#include "krigmis/doe.hpp"

namespace krigmis {

/// Factorized correlation matrix Gamma + tau2 I of one model on one design.
///
/// Immutable after construction. Prediction goes through the Cholesky factor;
/// the materialized inverse serves the quadratic-form diagnostics.
class KrigingState {
 public:
  /// Throws whatever corr_matrix throws.
  static KrigingState fit(const Design& design, const CorrelationModel& model,
                          const Nugget& nugget = Nugget{});

  /// State for an explicit SPD correlation matrix with no design attached.
  static KrigingState from_matrix(Eigen::MatrixXd gamma);

  bool has_design() const { return design_.has_value(); }
  const Design& design() const;
  const CorrelationModel& model() const;
  double nugget() const { return nugget_; }
  Eigen::Index size() const { return gamma_.rows(); }

  /// Gamma + tau2 I.
  const Eigen::MatrixXd& gamma() const { return gamma_; }
  const Eigen::LLT<Eigen::MatrixXd>& cholesky() const { return chol_; }
  Eigen::MatrixXd chol_lower() const { return chol_.matrixL(); }
  const Eigen::MatrixXd& gamma_inv() const { return gamma_inv_; }
  double logdet() const { return logdet_; }

  /// Gamma^{-1} v by triangular solves.
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const { return chol_.solve(v); }

  /// gamma(x0) = (R(x_j - x0))_j.
  Eigen::VectorXd cross(std::span<const double> x0) const;

 private:
  KrigingState(std::optional<Design> design, std::optional<CorrelationModel> model,
               RegularizedCorrelation factor);

  std::optional<Design> design_;
  std::optional<CorrelationModel> model_;
  double nugget_ = 0.0;
  Eigen::MatrixXd gamma_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::MatrixXd gamma_inv_;
  double logdet_ = 0.0;
};

inline KrigingState fit(const Design& design, const CorrelationModel& model,
                        const Nugget& nugget = Nugget{}) {
  return KrigingState::fit(design, model, nugget);
}

/// gamma^T Gamma^{-1} y.
double predict_mean(const KrigingState& state, const Eigen::VectorXd& y,
                    std::span<const double> x0);

/// c^2(x0) = 1 - gamma^T Gamma^{-1} gamma. Not clamped: rounding can make it
/// slightly negative for ill-conditioned matrices.
double predictive_variance_factor(const KrigingState& state,
                                  std::span<const double> x0);

/// Means and variance factors at every row of `points`.
struct BatchPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance_factor;
};
BatchPrediction predict_batch(const KrigingState& state, const Eigen::VectorXd& y,
                              const PointMatrix& points);

/// E_1[(yhat_0 - y_0)^2 | y] where yhat_0 uses the model state and the truth
/// is the true state: (g1' G1^-1 y - g2' G2^-1 y)^2 + 1 - g1' G1^-1 g1.
double conditional_mse(const KrigingState& true_state,
                       const KrigingState& model_state, const Eigen::VectorXd& y,
                       std::span<const double> x0);

struct LooResult {
  Eigen::VectorXd residuals;  // y_i - yhat_{i,-i}
  Eigen::VectorXd variances;  // c^2_{i,-i}
};

/// Leave-one-out residuals and variance factors from Gamma^{-1} alone.
LooResult loo_virtual(const KrigingState& state, const Eigen::VectorXd& y);

/// Throws InputError unless both states were fitted on identical points.
void require_same_design(const KrigingState& a, const KrigingState& b);

}  // namespace krigmis
