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

#include "krigmis/risk.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <vector>

#include "krigmis/error.hpp"
#include "krigmis/rng.hpp"

namespace krigmis {

double f_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw InputError("f_pair needs two square matrices of the same size");
  }
  // tr(AB) = sum_ij A_ij B_ji
  return a.trace() * b.trace() + 2.0 * a.cwiseProduct(b.transpose()).sum();
}

namespace {

void check_inputs(const RiskInputs& inputs) {
  require_same_design(inputs.true_state, inputs.model_state);
  const Eigen::Index n = inputs.true_state.size();
  if (inputs.estimator.matrix.rows() != n || inputs.estimator.matrix.cols() != n) {
    throw InputError("estimator matrix size does not match the design");
  }
}

// Gamma_2^{-1} gamma_2 - Gamma_1^{-1} gamma_1, c1 and c2.
struct PointTerms {
  Eigen::VectorXd diff;
  double c1;
  double c2;
};

PointTerms point_terms(const KrigingState& truth, const KrigingState& model,
                       std::span<const double> x0) {
  const Eigen::VectorXd g1 = truth.cross(x0);
  const Eigen::VectorXd g2 = model.cross(x0);
  const Eigen::VectorXd u1 = truth.gamma_inv() * g1;
  const Eigen::VectorXd u2 = model.gamma_inv() * g2;
  return {u2 - u1, 1.0 - g1.dot(u1), 1.0 - g2.dot(u2)};
}

RiskReport finish_report(double risk, double denom, double expected_variance,
                         double variance) {
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "target mean square error is not positive (" << denom << ")";
    throw DegenerateGeometryError(msg.str());
  }
  RiskReport report;
  report.risk = risk;
  report.denom = denom;
  report.expected_variance = expected_variance;
  report.rtr = std::sqrt(std::max(risk, 0.0)) / denom;
  report.btr = std::abs(denom - expected_variance) / denom;
  report.relative_variance = variance / (denom * denom);
  return report;
}

}  // namespace

double risk_closed_form(const RiskInputs& inputs) {
  check_inputs(inputs);
  const auto terms = point_terms(inputs.true_state, inputs.model_state, inputs.x0);
  const Eigen::MatrixXd& gamma1 = inputs.true_state.gamma();
  const Eigen::MatrixXd m0 = terms.diff * (terms.diff.transpose() * gamma1);
  const Eigen::MatrixXd m1 = inputs.estimator.matrix * gamma1;
  const double c1 = terms.c1;
  const double c2 = terms.c2;
  return f_pair(m0, m0) + 2.0 * c1 * m0.trace() - 2.0 * c2 * f_pair(m0, m1) +
         c1 * c1 - 2.0 * c1 * c2 * m1.trace() + c2 * c2 * f_pair(m1, m1);
}

RiskReport rtr_btr(const RiskInputs& inputs) {
  check_inputs(inputs);
  const auto terms = point_terms(inputs.true_state, inputs.model_state, inputs.x0);
  const Eigen::MatrixXd& gamma1 = inputs.true_state.gamma();
  const Eigen::MatrixXd m0 = terms.diff * (terms.diff.transpose() * gamma1);
  const Eigen::MatrixXd m1 = inputs.estimator.matrix * gamma1;
  const double c2 = terms.c2;
  const double risk = risk_closed_form(inputs);
  const double denom = m0.trace() + terms.c1;
  const double expected_variance = c2 * m1.trace();
  // var(y'(Q - c2 M)y) = 2 tr(((Q - c2 M) Gamma1)^2) with Q Gamma1 = M0.
  const Eigen::MatrixXd s = m0 - c2 * m1;
  const double variance = 2.0 * s.cwiseProduct(s.transpose()).sum();
  return finish_report(risk, denom, expected_variance, variance);
}

MonteCarloEstimate risk_monte_carlo(const RiskInputs& inputs, std::uint64_t draws,
                                    std::uint64_t seed) {
  check_inputs(inputs);
  if (draws < 1000) throw InputError("risk_monte_carlo needs at least 1000 draws");
  const auto terms = point_terms(inputs.true_state, inputs.model_state, inputs.x0);
  const Eigen::MatrixXd lower = inputs.true_state.chol_lower();
  // Whitened: y = L z, (a'y)^2 = (L'a . z)^2, y'My = z'(L'ML)z.
  const Eigen::VectorXd a = lower.transpose() * terms.diff;
  const Eigen::MatrixXd mw = lower.transpose() * inputs.estimator.matrix * lower;
  const Eigen::Index n = a.size();
  const double c1 = terms.c1;
  const double c2 = terms.c2;

  const std::uint64_t chunks = (draws + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<double> means(chunks), m2s(chunks);
  std::vector<std::uint64_t> counts(chunks);
#pragma omp parallel
  {
    Eigen::VectorXd z(n);
#pragma omp for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(chunks); ++k) {
      const auto chunk = static_cast<std::uint64_t>(k);
      Rng rng(substream_seed(seed, chunk));
      const std::uint64_t begin = chunk * kMonteCarloChunk;
      const std::uint64_t count = std::min(kMonteCarloChunk, draws - begin);
      double mean = 0.0, m2 = 0.0;
      for (std::uint64_t i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) z(j) = rng.normal();
        const double proj = a.dot(z);
        const double target = proj * proj + c1;
        const double value = target - z.dot(mw * z) * c2;
        const double sq = value * value;
        const double delta = sq - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (sq - mean);
      }
      means[chunk] = mean;
      m2s[chunk] = m2;
      counts[chunk] = count;
    }
  }
  // Chan et al. pairwise combination in chunk order.
  double mean = 0.0, m2 = 0.0;
  std::uint64_t total = 0;
  for (std::uint64_t k = 0; k < chunks; ++k) {
    const double nb = static_cast<double>(counts[k]);
    const double na = static_cast<double>(total);
    const double delta = means[k] - mean;
    total += counts[k];
    mean += delta * nb / static_cast<double>(total);
    m2 += m2s[k] + delta * delta * na * nb / static_cast<double>(total);
  }
  MonteCarloEstimate out;
  out.estimate = mean;
  out.draws = total;
  const double var = m2 / static_cast<double>(total - 1);
  out.std_error = std::sqrt(var / static_cast<double>(total));
  return out;
}

RiskContext::RiskContext(const KrigingState& true_state,
                         const KrigingState& model_state,
                         const EstimatorMatrix& estimator)
    : true_state_(&true_state), model_state_(&model_state) {
  require_same_design(true_state, model_state);
  gamma1_ = true_state.gamma();
  const Eigen::MatrixXd m1 = estimator.matrix * gamma1_;
  sandwich_ = gamma1_ * m1;
  sandwich_ = 0.5 * (sandwich_ + sandwich_.transpose()).eval();
  trace_m1_ = m1.trace();
  trace_m1_sq_ = m1.cwiseProduct(m1.transpose()).sum();
}

RiskReport RiskContext::at(std::span<const double> x0) const {
  const auto terms = point_terms(*true_state_, *model_state_, x0);
  const Eigen::VectorXd& a = terms.diff;
  const double c1 = terms.c1;
  const double c2 = terms.c2;
  // M0 = a a' Gamma1 has tr(M0) = a'Gamma1 a, tr(M0^2) = tr(M0)^2 and
  // tr(M0 M1) = a' Gamma1 M Gamma1 a.
  const double t0 = a.dot(gamma1_ * a);
  const double q = a.dot(sandwich_ * a);
  const double t1 = trace_m1_;
  const double s1 = trace_m1_sq_;
  const double f00 = 3.0 * t0 * t0;
  const double f01 = t0 * t1 + 2.0 * q;
  const double f11 = t1 * t1 + 2.0 * s1;
  const double risk = f00 + 2.0 * c1 * t0 - 2.0 * c2 * f01 + c1 * c1 -
                      2.0 * c1 * c2 * t1 + c2 * c2 * f11;
  const double variance = 2.0 * (t0 * t0 - 2.0 * c2 * q + c2 * c2 * s1);
  return finish_report(risk, t0 + c1, c2 * t1, variance);
}

IntegratedCriteria integrated_criteria(const RiskContext& context,
                                       const PointMatrix& test_points) {
  const Eigen::Index m = test_points.rows();
  if (m == 0) throw InputError("integrated criteria need at least one test point");
  std::vector<double> rtr2(static_cast<std::size_t>(m)), btr2(static_cast<std::size_t>(m));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(static)
  for (Eigen::Index t = 0; t < m; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    try {
      const auto report = context.at(
          {test_points.row(t).data(), static_cast<std::size_t>(test_points.cols())});
      rtr2[idx] = report.rtr * report.rtr;
      btr2[idx] = report.btr * report.btr;
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (std::size_t t = 0; t < errors.size(); ++t) {
    if (!errors[t]) continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const DegenerateGeometryError& e) {
      throw DegenerateGeometryError("test point " + std::to_string(t) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("test point " + std::to_string(t) + ": " + e.what());
    }
  }
  double sum_r = 0.0, sum_b = 0.0;
  for (std::size_t t = 0; t < rtr2.size(); ++t) {
    sum_r += rtr2[t];
    sum_b += btr2[t];
  }
  const double mm = static_cast<double>(m);
  return {std::sqrt(sum_r / mm), std::sqrt(sum_b / mm)};
}

IntegratedCriteria integrated_criteria(const CorrelationModel& true_model,
                                       const CorrelationModel& model, Method kind,
                                       const Design& design,
                                       const PointMatrix& test_points,
                                       const Nugget& nugget) {
  const auto truth = KrigingState::fit(design, true_model, nugget);
  const auto fitted = KrigingState::fit(design, model, nugget);
  const auto estimator = estimator_matrix(kind, fitted);
  return integrated_criteria(RiskContext(truth, fitted, estimator), test_points);
}

}  // namespace krigmis
