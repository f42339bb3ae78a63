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

#include <span>

#include <Eigen/Dense>

namespace krigmis {

/// sin(u1) + 7 sin(u2)^2 + 0.1 u3^4 sin(u1), u = -pi + 2 pi x, on [0,1]^3.
double ishigami(std::span<const double> x);

/// Simplified Morris function on [0,1]^10.
double morris(std::span<const double> x);

/// (1/n) sum (truth - prediction)^2.
double mse_criterion(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truths);

/// |log((1/n) sum (truth - prediction)^2 / variance)|, natural log. Throws
/// InputError naming the first index whose variance is not positive.
double pva_criterion(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truths,
                     const Eigen::VectorXd& predictive_variances);

}  // namespace krigmis
