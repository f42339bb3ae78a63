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

#include "krigmis/bfgs.hpp"

#include <cmath>
#include <limits>

#include "krigmis/error.hpp"

namespace krigmis {
namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                               const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper) {
  return (x - project(x - g, lower, upper)).cwiseAbs().maxCoeff();
}

}  // namespace

BfgsResult minimize_box_bfgs(const GradientObjective& objective, Eigen::VectorXd start,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const BfgsOptions& options) {
  const Eigen::Index k = start.size();
  if (lower.size() != k || upper.size() != k) {
    throw InputError("bound vectors do not match the start point");
  }
  if ((lower.array() > upper.array()).any()) {
    throw InputError("lower bound exceeds upper bound");
  }
  BfgsResult result;
  Eigen::VectorXd x = project(start, lower, upper);
  Eigen::VectorXd g(k);
  double f = objective(x, g);
  result.evaluations = 1;
  if (!std::isfinite(f) || !g.allFinite()) {
    result.x = x;
    result.value = f;
    result.status = "non-finite objective at start";
    return result;
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(k, k);
  bool fresh = true;
  Eigen::VectorXd gn(k);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter;
    const double tol = options.gradient_tolerance * std::max(1.0, std::abs(f));
    if (projected_gradient_norm(x, g, lower, upper) <= tol) {
      result.converged = true;
      result.status = "projected gradient below tolerance";
      break;
    }
    // Coordinates pinned at a bound with the gradient pushing outward.
    Eigen::VectorXd free = Eigen::VectorXd::Ones(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if ((x(i) <= lower(i) && g(i) > 0.0) || (x(i) >= upper(i) && g(i) < 0.0)) {
        free(i) = 0.0;
      }
    }
    Eigen::VectorXd dir = -(h * g.cwiseProduct(free)).cwiseProduct(free);
    if (!(g.dot(dir) < 0.0)) {
      h.setIdentity();
      fresh = true;
      dir = -g.cwiseProduct(free);
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd xn(k);
    double fn = std::numeric_limits<double>::infinity();
    for (int bt = 0; bt < options.max_backtracks; ++bt, step *= 0.5) {
      xn = project(x + step * dir, lower, upper);
      if ((xn - x).cwiseAbs().maxCoeff() == 0.0) break;
      try {
        fn = objective(xn, gn);
      } catch (const Error&) {
        fn = std::numeric_limits<double>::infinity();
      }
      ++result.evaluations;
      if (std::isfinite(fn) && gn.allFinite() && fn <= f + 1e-4 * g.dot(xn - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!fresh) {
        h.setIdentity();
        fresh = true;
        continue;
      }
      result.converged = true;
      result.status = "line search cannot decrease the objective";
      break;
    }

    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd yv = gn - g;
    const bool projected = (xn - (x + step * dir)).cwiseAbs().maxCoeff() > 0.0;
    const double decrease = f - fn;
    x = xn;
    g = gn;
    f = fn;
    if (projected) {
      h.setIdentity();
      fresh = true;
    } else {
      const double sy = s.dot(yv);
      if (sy > 1e-12 * s.norm() * yv.norm()) {
        if (fresh) {
          h *= sy / yv.squaredNorm();
          fresh = false;
        }
        const double rho = 1.0 / sy;
        const Eigen::MatrixXd left =
            Eigen::MatrixXd::Identity(k, k) - rho * s * yv.transpose();
        h = left * h * left.transpose() + rho * s * s.transpose();
      }
    }
    if (decrease <= options.function_tolerance * std::max(1.0, std::abs(f))) {
      result.converged = true;
      result.status = "relative decrease below tolerance";
      result.iterations = iter + 1;
      break;
    }
    result.iterations = iter + 1;
  }
  if (!result.converged && result.status.empty()) {
    result.status = "iteration limit reached";
  }
  result.x = x;
  result.value = f;
  return result;
}

}  // namespace krigmis
