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

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "krigmis/krig.hpp"
#include "krigmis/varest.hpp"

namespace krigmis {

/// f(A, B) = tr(A) tr(B) + 2 tr(AB). Throws InputError on size mismatch.
double f_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Truth and model states on one design, a quadratic estimator and a point.
/// Non-owning view.
struct RiskInputs {
  const KrigingState& true_state;
  const KrigingState& model_state;
  const EstimatorMatrix& estimator;
  std::span<const double> x0;
};

/// Risk of the predictive variance sigma2_hat c^2(x0), evaluated with the
/// explicit n x n matrices M0, M1.
double risk_closed_form(const RiskInputs& inputs);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t draws = 0;
};

/// Draws per substream chunk of risk_monte_carlo.
inline constexpr std::uint64_t kMonteCarloChunk = 8192;

/// Sample mean of (E_1[(yhat_0 - y_0)^2 | y] - y'My c^2(x0))^2 over
/// y = L_1 z. Chunk k draws from substream k of `seed`, so the result does
/// not depend on the number of threads. Requires draws >= 1000.
MonteCarloEstimate risk_monte_carlo(const RiskInputs& inputs, std::uint64_t draws,
                                    std::uint64_t seed);

struct RiskReport {
  double risk = 0.0;
  double rtr = 0.0;
  double btr = 0.0;
  double denom = 0.0;              // E_1[(yhat_0 - y_0)^2]
  double expected_variance = 0.0;  // E_1[sigma2_hat c^2(x0)]
  double relative_variance = 0.0;  // var_1(target - sigma2_hat c^2) / denom^2
};

/// Pointwise RTR and BTR from the explicit-matrix closed forms. The relative
/// variance is computed from its own trace formula, not as rtr^2 - btr^2.
/// Throws DegenerateGeometryError when denom <= 0.
RiskReport rtr_btr(const RiskInputs& inputs);

/// Point-independent part of the closed forms for one (truth, model,
/// estimator) triple. Per-point evaluation is O(n^2) using the rank-one
/// structure of M0.
class RiskContext {
 public:
  RiskContext(const KrigingState& true_state, const KrigingState& model_state,
              const EstimatorMatrix& estimator);

  RiskReport at(std::span<const double> x0) const;

  Eigen::Index size() const { return gamma1_.rows(); }

 private:
  const KrigingState* true_state_;
  const KrigingState* model_state_;
  Eigen::MatrixXd gamma1_;
  Eigen::MatrixXd sandwich_;  // Gamma1 M Gamma1
  double trace_m1_ = 0.0;     // tr(M Gamma1)
  double trace_m1_sq_ = 0.0;  // tr((M Gamma1)^2)
};

struct IntegratedCriteria {
  double irtr = 0.0;
  double ibtr = 0.0;
};

/// sqrt of the test-sample means of RTR^2 and BTR^2. Per-point reports are
/// computed in parallel and reduced in index order. Errors at a test point
/// are rethrown with its index.
IntegratedCriteria integrated_criteria(const RiskContext& context,
                                       const PointMatrix& test_points);

/// Convenience overload fitting both models on `design`.
IntegratedCriteria integrated_criteria(const CorrelationModel& true_model,
                                       const CorrelationModel& model, Method kind,
                                       const Design& design,
                                       const PointMatrix& test_points,
                                       const Nugget& nugget = Nugget{});

}  // namespace krigmis
