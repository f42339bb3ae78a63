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

#include <Eigen/Dense>

#include "krigmis/corr.hpp"
#include "krigmis/doe.hpp"
#include "krigmis/risk.hpp"

/// Serial, straightforward versions of the parallel kernels. They share the
/// random streams of their parallel counterparts and exist for testing and
/// benchmarking.
namespace krigmis::reference {

/// Pairwise correlation() calls, row by row.
Eigen::MatrixXd assemble_correlation(const CorrelationModel& model, const PointMatrix& points);

/// Sequential scan over the candidates of krigmis::lhs_maximin.
Design lhs_maximin(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                   std::uint64_t candidates = 1000);

/// Draw-by-draw evaluation with y = L z, conditional_mse and y'My c^2(x0),
/// accumulated as a plain running sum.
MonteCarloEstimate risk_monte_carlo(const RiskInputs& inputs, std::uint64_t draws,
                                    std::uint64_t seed);

/// Loop over test points with the explicit-matrix rtr_btr.
IntegratedCriteria integrated_criteria(const KrigingState& true_state,
                                       const KrigingState& model_state,
                                       const EstimatorMatrix& estimator,
                                       const PointMatrix& test_points);

}  // namespace krigmis::reference
