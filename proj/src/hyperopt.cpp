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

#include "krigmis/hyperopt.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "krigmis/error.hpp"
#include "krigmis/krig.hpp"

namespace krigmis {

HyperParamSpace HyperParamSpace::exponential(int dim, LengthMode mode) {
  HyperParamSpace s;
  s.family = Family::PowerExponential;
  s.length_mode = mode;
  s.dim = dim;
  s.fixed_shape = 1.0;
  return s;
}

HyperParamSpace HyperParamSpace::gaussian(int dim, LengthMode mode) {
  HyperParamSpace s = exponential(dim, mode);
  s.fixed_shape = 2.0;
  return s;
}

HyperParamSpace HyperParamSpace::matern(int dim, LengthMode mode) {
  HyperParamSpace s;
  s.family = Family::Matern;
  s.length_mode = mode;
  s.dim = dim;
  s.shape_bounds = Interval{0.5, 5.0};
  s.fixed_shape = 1.5;
  return s;
}

HyperParamSpace HyperParamSpace::matern_fixed(int dim, LengthMode mode, double nu) {
  HyperParamSpace s = matern(dim, mode);
  s.shape_bounds.reset();
  s.fixed_shape = nu;
  return s;
}

std::size_t HyperParamSpace::num_lengths() const {
  return length_mode == LengthMode::Isotropic ? 1 : static_cast<std::size_t>(dim);
}

std::size_t HyperParamSpace::num_free() const {
  return num_lengths() + (shape_free() ? 1 : 0);
}

Eigen::VectorXd HyperParamSpace::lower() const {
  Eigen::VectorXd lo(static_cast<Eigen::Index>(num_free()));
  for (std::size_t i = 0; i < num_lengths(); ++i) lo(static_cast<Eigen::Index>(i)) = log_length_bounds.lower;
  if (shape_free()) lo(lo.size() - 1) = shape_bounds->lower;
  return lo;
}

Eigen::VectorXd HyperParamSpace::upper() const {
  Eigen::VectorXd hi(static_cast<Eigen::Index>(num_free()));
  for (std::size_t i = 0; i < num_lengths(); ++i) hi(static_cast<Eigen::Index>(i)) = log_length_bounds.upper;
  if (shape_free()) hi(hi.size() - 1) = shape_bounds->upper;
  return hi;
}

void HyperParamSpace::validate() const {
  if (dim < 1) throw InputError("hyper-parameter space needs dim >= 1");
  if (!(log_length_bounds.lower < log_length_bounds.upper)) {
    throw InputError("log-length bounds must satisfy lower < upper");
  }
  if (shape_bounds && !(shape_bounds->lower < shape_bounds->upper)) {
    throw InputError("shape bounds must satisfy lower < upper");
  }
  if (shape_bounds && !(shape_bounds->lower > 0.0)) {
    throw InputError("shape lower bound must be positive");
  }
  if (family == Family::PowerExponential) {
    const double top = shape_bounds ? shape_bounds->upper : fixed_shape;
    if (top > 2.0) throw InputError("power-exponential exponent must not exceed 2");
  }
}

bool HyperParamSpace::is_smooth() const {
  if (family == Family::Matern) return shape_free();
  return !shape_free() && fixed_shape == 2.0;
}

CorrelationModel HyperParamSpace::to_model(const Eigen::VectorXd& theta) const {
  if (static_cast<std::size_t>(theta.size()) != num_free()) {
    throw InputError("hyper-parameter vector has the wrong size");
  }
  std::vector<double> lengths(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    const Eigen::Index src = length_mode == LengthMode::Isotropic ? 0 : i;
    lengths[static_cast<std::size_t>(i)] = std::exp(theta(src));
  }
  const double shape = shape_free() ? theta(theta.size() - 1) : fixed_shape;
  return {family, std::move(lengths), shape};
}

Eigen::VectorXd HyperParamSpace::from_model(const CorrelationModel& model) const {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(num_free()));
  for (std::size_t i = 0; i < num_lengths(); ++i) {
    theta(static_cast<Eigen::Index>(i)) = std::log(model.lengths()[i]);
  }
  if (shape_free()) theta(theta.size() - 1) = model.shape();
  return theta;
}

namespace {

double log_det_over_n(const KrigingState& state) {
  return state.logdet() / static_cast<double>(state.size());
}

double quadratic(const KrigingState& state, const Eigen::VectorXd& y) {
  const double yay = y.dot(state.solve(y));
  if (!(yay > 0.0) || !std::isfinite(yay)) {
    std::ostringstream msg;
    msg << "y' Gamma^-1 y is not positive (" << yay << ")";
    throw ConditioningError(msg.str(), state.nugget());
  }
  return yay;
}

void check_data(const Design& design, const Eigen::VectorXd& y) {
  if (y.size() != design.size()) {
    throw InputError("observation vector length does not match the design");
  }
  if (!y.allFinite()) throw InputError("observations must be finite");
}

}  // namespace

double f_ml(const CorrelationModel& theta, const Design& design,
            const Eigen::VectorXd& y, const Nugget& nugget) {
  check_data(design, y);
  const auto state = KrigingState::fit(design, theta, nugget);
  return log_det_over_n(state) + std::log(quadratic(state, y));
}

double f_cv(const CorrelationModel& theta, const Design& design,
            const Eigen::VectorXd& y, const Nugget& nugget) {
  check_data(design, y);
  const auto state = KrigingState::fit(design, theta, nugget);
  const Eigen::VectorXd alpha = state.gamma_inv() * y;
  const Eigen::VectorXd d = state.gamma_inv().diagonal();
  return (alpha.array() / d.array()).square().sum();
}

CvPenalty CvPenalty::for_data(const Eigen::VectorXd& y) {
  const double v = y.squaredNorm() / static_cast<double>(y.size());
  if (!(v > 0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
  return {1000.0 * v, 1e-6 / (v * v)};
}

double CvPenalty::value(double sigma2_cv) const {
  const double excess = std::max(0.0, sigma2_cv - threshold);
  return stiffness * excess * excess;
}

double CvPenalty::slope(double sigma2_cv) const {
  return 2.0 * stiffness * std::max(0.0, sigma2_cv - threshold);
}

ObjectiveEvaluation evaluate_objective(Method method, const HyperParamSpace& space,
                                       const Eigen::VectorXd& theta,
                                       const Design& design, const Eigen::VectorXd& y,
                                       const Nugget& nugget, bool penalize) {
  check_data(design, y);
  const CorrelationModel model = space.to_model(theta);
  const auto state = KrigingState::fit(design, model, nugget);
  const Eigen::MatrixXd& inv = state.gamma_inv();
  const Eigen::Index n = state.size();
  const double nn = static_cast<double>(n);
  const Eigen::VectorXd alpha = state.solve(y);

  ObjectiveEvaluation out;
  out.nugget = state.nugget();
  // The gradient of every objective is sum_jk W_jk dGamma_jk / dtheta.
  Eigen::MatrixXd weights;
  if (method == Method::ML) {
    const double yay = quadratic(state, y);
    out.value = log_det_over_n(state) + std::log(yay);
    out.sigma2 = yay / nn;
    weights = inv / nn - alpha * alpha.transpose() / yay;
  } else {
    const Eigen::VectorXd d = inv.diagonal();
    const Eigen::ArrayXd a = alpha.array();
    const Eigen::ArrayXd da = d.array();
    out.value = (a / da).square().sum();
    out.sigma2 = (a.square() / da).sum() / nn;
    const Eigen::VectorXd u = inv * (a / da.square()).matrix();
    const Eigen::VectorXd c = a.square() / da.cube();
    weights = -(u * alpha.transpose() + alpha * u.transpose()) +
              2.0 * inv * c.asDiagonal() * inv;
    if (penalize) {
      const auto penalty = CvPenalty::for_data(y);
      out.penalty = penalty.value(out.sigma2);
      out.value += out.penalty;
      const double slope = penalty.slope(out.sigma2);
      if (slope > 0.0) {
        const Eigen::VectorXd v = inv * (a / da).matrix();
        const Eigen::VectorXd c2 = (a / da).square();
        const Eigen::MatrixXd ws =
            (-(v * alpha.transpose() + alpha * v.transpose()) +
             inv * c2.asDiagonal() * inv) / nn;
        weights += slope * ws;
      }
    }
  }
  if (!std::isfinite(out.value)) {
    throw ConditioningError("objective is not finite", state.nugget());
  }

  const auto grads =
      correlation_matrix_gradients(model, design.points, space.shape_free());
  out.gradient.setZero(static_cast<Eigen::Index>(space.num_free()));
  const auto d = static_cast<std::size_t>(space.dim);
  for (std::size_t i = 0; i < d; ++i) {
    const double gi = weights.cwiseProduct(grads[i]).sum();
    const Eigen::Index dst = space.length_mode == LengthMode::Isotropic
                                 ? 0
                                 : static_cast<Eigen::Index>(i);
    out.gradient(dst) += gi;
  }
  if (space.shape_free()) {
    out.gradient(out.gradient.size() - 1) = weights.cwiseProduct(grads[d]).sum();
  }
  return out;
}

Eigen::VectorXd grad_f_ml(const HyperParamSpace& space, const Eigen::VectorXd& theta,
                          const Design& design, const Eigen::VectorXd& y,
                          const Nugget& nugget) {
  return evaluate_objective(Method::ML, space, theta, design, y, nugget, false).gradient;
}

Eigen::VectorXd grad_f_cv(const HyperParamSpace& space, const Eigen::VectorXd& theta,
                          const Design& design, const Eigen::VectorXd& y,
                          const Nugget& nugget) {
  return evaluate_objective(Method::CV, space, theta, design, y, nugget, false).gradient;
}

bool penalty_applies(Method method, const HyperParamSpace& space, PenaltyMode mode) {
  if (method != Method::CV) return false;
  switch (mode) {
    case PenaltyMode::On:
      return true;
    case PenaltyMode::Off:
      return false;
    case PenaltyMode::Auto:
      return space.is_smooth();
  }
  return false;
}

EstimationResult estimate(Method method, const Design& design, const Eigen::VectorXd& y,
                          const HyperParamSpace& space, const OptimizerConfig& config) {
  space.validate();
  check_data(design, y);
  if (design.size() < 3) throw InputError("estimation needs at least three points");
  if (config.starts < 1) throw InputError("estimation needs at least one start");
  if (static_cast<Eigen::Index>(space.dim) != design.dim()) {
    throw InputError("hyper-parameter space dimension does not match the design");
  }
  const bool penalize = penalty_applies(method, space, config.penalty);
  const Eigen::VectorXd lo = space.lower();
  const Eigen::VectorXd hi = space.upper();
  const auto k = static_cast<Eigen::Index>(space.num_free());
  const Design unit = config.starts >= 2
                          ? lhs_maximin(config.starts, k, config.seed,
                                        std::max<std::uint64_t>(1, config.start_candidates))
                          : lhs(1, k, config.seed);

  BfgsOptions options;
  options.max_iterations = config.max_iterations;
  options.gradient_tolerance = config.tolerance;

  const auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    auto eval = evaluate_objective(method, space, theta, design, y, config.nugget, penalize);
    grad = std::move(eval.gradient);
    return eval.value;
  };

  std::vector<StartDiagnostic> diags(static_cast<std::size_t>(config.starts));
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < config.starts; ++s) {
    auto& diag = diags[static_cast<std::size_t>(s)];
    const Eigen::VectorXd u = unit.points.row(s).transpose();
    diag.start = lo + u.cwiseProduct(hi - lo);
    try {
      Eigen::VectorXd g;
      diag.start_value = objective(diag.start, g);
      const auto run = minimize_box_bfgs(objective, diag.start, lo, hi, options);
      diag.end = run.x;
      diag.value = run.value;
      diag.iterations = run.iterations;
      diag.converged = run.converged;
      diag.status = run.status;
      diag.failed = !std::isfinite(run.value);
    } catch (const Error& e) {
      diag.failed = true;
      diag.value = std::numeric_limits<double>::infinity();
      diag.status = e.what();
    }
  }

  std::optional<std::size_t> best;
  for (std::size_t s = 0; s < diags.size(); ++s) {
    if (diags[s].failed) continue;
    if (!best || diags[s].value < diags[*best].value) best = s;
  }
  if (!best) {
    std::ostringstream msg;
    msg << "all " << config.starts << " optimizer starts failed";
    for (std::size_t s = 0; s < diags.size(); ++s) {
      msg << "; start " << s << ": " << diags[s].status;
    }
    throw EstimationError(msg.str());
  }

  const Eigen::VectorXd theta = diags[*best].end;
  const auto final_eval =
      evaluate_objective(method, space, theta, design, y, config.nugget, penalize);
  EstimationResult result{method, space.to_model(theta), theta, 0.0, 0.0, 0.0, 0, 0, false, false, {}};
  result.sigma2_hat = final_eval.sigma2;
  result.objective = final_eval.value;
  result.nugget = final_eval.nugget;
  result.starts = config.starts;
  for (const auto& d : diags) result.converged_starts += d.converged ? 1 : 0;
  result.penalty_active = penalize;
  result.penalty_engaged = final_eval.penalty > 0.0;
  result.diagnostics = std::move(diags);
  return result;
}

}  // namespace krigmis
