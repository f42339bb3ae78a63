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

#include "krigmis/reference.hpp"

#include <cmath>
#include <vector>

#include "krigmis/error.hpp"
#include "krigmis/krig.hpp"
#include "krigmis/rng.hpp"

namespace krigmis::reference {

Eigen::MatrixXd assemble_correlation(const CorrelationModel& model, const PointMatrix& points) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  Eigen::MatrixXd gamma(n, n);
  std::vector<double> h(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        h[static_cast<std::size_t>(k)] = points(i, k) - points(j, k);
      }
      gamma(i, j) = correlation(model, h);
    }
  }
  return gamma;
}

Design lhs_maximin(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                   std::uint64_t candidates) {
  if (candidates == 0) throw InputError("lhs_maximin needs at least one candidate");
  if (n < 2) throw InputError("lhs_maximin needs n >= 2");
  Design best = lhs(n, d, seed, 0);
  double best_dist = min_pairwise_distance(best.points);
  for (std::uint64_t k = 1; k < candidates; ++k) {
    Design cand = lhs(n, d, seed, k);
    const double dist = min_pairwise_distance(cand.points);
    if (dist > best_dist) {
      best = std::move(cand);
      best_dist = dist;
    }
  }
  best.kind = DesignKind::LHSMaximin;
  best.seed = seed;
  best.meta.candidates = candidates;
  return best;
}

MonteCarloEstimate risk_monte_carlo(const RiskInputs& inputs, std::uint64_t draws,
                                    std::uint64_t seed) {
  if (draws < 1000) throw InputError("risk_monte_carlo needs at least 1000 draws");
  const Eigen::MatrixXd lower = inputs.true_state.chol_lower();
  const Eigen::Index n = lower.rows();
  const double c2 = predictive_variance_factor(inputs.model_state, inputs.x0);
  double sum = 0.0;
  double sum_sq = 0.0;
  Eigen::VectorXd z(n);
  Rng rng(substream_seed(seed, 0));
  for (std::uint64_t i = 0; i < draws; ++i) {
    if (i > 0 && i % kMonteCarloChunk == 0) rng = Rng(substream_seed(seed, i / kMonteCarloChunk));
    for (Eigen::Index j = 0; j < n; ++j) z(j) = rng.normal();
    const Eigen::VectorXd y = lower * z;
    const double target = conditional_mse(inputs.true_state, inputs.model_state, y, inputs.x0);
    const double value = target - inputs.estimator.apply(y) * c2;
    const double sq = value * value;
    sum += sq;
    sum_sq += sq * sq;
  }
  const double count = static_cast<double>(draws);
  const double mean = sum / count;
  const double var = (sum_sq - count * mean * mean) / (count - 1.0);
  return {mean, std::sqrt(std::max(var, 0.0) / count), draws};
}

IntegratedCriteria integrated_criteria(const KrigingState& true_state,
                                       const KrigingState& model_state,
                                       const EstimatorMatrix& estimator,
                                       const PointMatrix& test_points) {
  double rtr2 = 0.0;
  double btr2 = 0.0;
  for (Eigen::Index t = 0; t < test_points.rows(); ++t) {
    const std::span<const double> x0(test_points.row(t).data(),
                                     static_cast<std::size_t>(test_points.cols()));
    const RiskReport r = rtr_btr({true_state, model_state, estimator, x0});
    rtr2 += r.rtr * r.rtr;
    btr2 += r.btr * r.btr;
  }
  const double nt = static_cast<double>(test_points.rows());
  return {std::sqrt(rtr2 / nt), std::sqrt(btr2 / nt)};
}

}  // namespace krigmis::reference
