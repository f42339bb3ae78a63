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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "krigmis/bfgs.hpp"
#include "krigmis/corr.hpp"
#include "krigmis/doe.hpp"
#include "krigmis/varest.hpp"

namespace krigmis {

enum class LengthMode { Isotropic, Anisotropic };

struct Interval {
  double lower;
  double upper;
};

/// Box of free correlation hyper-parameters. Lengths are searched in log
/// space; the shape is either fixed or bounded.
///
/// Free coordinates are ordered: log-lengths (1 when isotropic, d otherwise),
/// then the shape when it is free.
struct HyperParamSpace {
  Family family = Family::PowerExponential;
  LengthMode length_mode = LengthMode::Anisotropic;
  int dim = 1;
  Interval log_length_bounds{std::log(0.05), std::log(5.0)};
  std::optional<Interval> shape_bounds;  // nullopt: shape fixed
  double fixed_shape = 1.0;

  static HyperParamSpace exponential(int dim, LengthMode mode);
  static HyperParamSpace gaussian(int dim, LengthMode mode);
  /// Matern with free nu in [0.5, 5].
  static HyperParamSpace matern(int dim, LengthMode mode);
  static HyperParamSpace matern_fixed(int dim, LengthMode mode, double nu);

  std::size_t num_lengths() const;
  std::size_t num_free() const;
  bool shape_free() const { return shape_bounds.has_value(); }
  Eigen::VectorXd lower() const;
  Eigen::VectorXd upper() const;

  CorrelationModel to_model(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd from_model(const CorrelationModel& model) const;

  /// Throws InputError unless every free interval has lower < upper.
  void validate() const;
  /// Gaussian, or Matern with free nu: the families whose CV fit is penalized.
  bool is_smooth() const;
};

enum class PenaltyMode { Auto, On, Off };

struct OptimizerConfig {
  int starts = 10;
  int max_iterations = 200;
  double tolerance = 1e-6;
  PenaltyMode penalty = PenaltyMode::Auto;
  std::uint64_t seed = 0;
  std::uint64_t start_candidates = 1000;
  Nugget nugget{};
};

/// (1/n) log det Gamma + log(y' Gamma^{-1} y).
double f_ml(const CorrelationModel& theta, const Design& design,
            const Eigen::VectorXd& y, const Nugget& nugget = Nugget{});

/// y' Gamma^{-1} diag(Gamma^{-1})^{-2} Gamma^{-1} y, the leave-one-out sum of
/// squared residuals.
double f_cv(const CorrelationModel& theta, const Design& design,
            const Eigen::VectorXd& y, const Nugget& nugget = Nugget{});

/// Hinge on sigma2_cv: kappa max(0, s - 1000 v)^2 with v = y'y/n, kappa = 1e-6/v^2.
struct CvPenalty {
  double threshold;
  double stiffness;
  static CvPenalty for_data(const Eigen::VectorXd& y);
  double value(double sigma2_cv) const;
  double slope(double sigma2_cv) const;
};

struct ObjectiveEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
  double sigma2 = 0.0;       // ML or CV estimate at theta
  double penalty = 0.0;      // penalty contribution to value
  double nugget = 0.0;       // tau2 used after escalation
};

/// Objective and analytic gradient over the free coordinates of `space`.
ObjectiveEvaluation evaluate_objective(Method method, const HyperParamSpace& space,
                                       const Eigen::VectorXd& theta,
                                       const Design& design, const Eigen::VectorXd& y,
                                       const Nugget& nugget, bool penalize);

Eigen::VectorXd grad_f_ml(const HyperParamSpace& space, const Eigen::VectorXd& theta,
                          const Design& design, const Eigen::VectorXd& y,
                          const Nugget& nugget = Nugget{});
Eigen::VectorXd grad_f_cv(const HyperParamSpace& space, const Eigen::VectorXd& theta,
                          const Design& design, const Eigen::VectorXd& y,
                          const Nugget& nugget = Nugget{});

struct StartDiagnostic {
  Eigen::VectorXd start;
  Eigen::VectorXd end;
  double start_value = 0.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string status;
};

struct EstimationResult {
  Method method;
  CorrelationModel theta_hat;
  Eigen::VectorXd theta_vector;
  double sigma2_hat = 0.0;
  double objective = 0.0;
  double nugget = 0.0;
  int starts = 0;
  int converged_starts = 0;
  bool penalty_active = false;   // penalty included in the objective
  bool penalty_engaged = false;  // hinge positive at theta_hat
  std::vector<StartDiagnostic> diagnostics;
};

/// Multi-start box BFGS from an LHS-Maximin set of starts over the free
/// coordinates. The smallest final objective wins, ties to the lowest start
/// index. Throws EstimationError when no start yields a finite objective.
EstimationResult estimate(Method method, const Design& design, const Eigen::VectorXd& y,
                          const HyperParamSpace& space, const OptimizerConfig& config);

/// Whether `estimate` adds the CV penalty for this method, space and mode.
bool penalty_applies(Method method, const HyperParamSpace& space, PenaltyMode mode);

}  // namespace krigmis
