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

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace krigmis {

/// Objective returning f(x) and writing the gradient. May throw; a throwing
/// trial point is treated as infeasible by the line search.
using GradientObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct BfgsOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;  // on the projected gradient, relative to max(1, |f|)
  double function_tolerance = 1e-12;
  int max_backtracks = 40;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string status;
};

/// Quasi-Newton descent with the inverse-Hessian BFGS update inside the box
/// [lower, upper]. Steps are projected onto the box; coordinates held at a
/// bound by the gradient are frozen, and the Hessian approximation restarts
/// from the identity whenever a projection cuts a step.
BfgsResult minimize_box_bfgs(const GradientObjective& objective, Eigen::VectorXd start,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const BfgsOptions& options = {});

}  // namespace krigmis
