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

#include "krigmis/functions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "krigmis/error.hpp"

namespace krigmis {

namespace {

void require_dim(std::span<const double> x, std::size_t d, const char* name) {
  if (x.size() != d) {
    std::ostringstream msg;
    msg << name << " expects a point of dimension " << d << ", got " << x.size();
    throw InputError(msg.str());
  }
}

void require_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InputError("criterion vectors differ in length");
  if (a.size() == 0) throw InputError("criterion vectors are empty");
}

}  // namespace

double ishigami(std::span<const double> x) {
  require_dim(x, 3, "ishigami");
  constexpr double pi = std::numbers::pi;
  const double u1 = -pi + 2.0 * pi * x[0];
  const double u2 = -pi + 2.0 * pi * x[1];
  const double u3 = -pi + 2.0 * pi * x[2];
  const double s2 = std::sin(u2);
  return std::sin(u1) + 7.0 * s2 * s2 + 0.1 * std::pow(u3, 4) * std::sin(u1);
}

double morris(std::span<const double> x) {
  require_dim(x, 10, "morris");
  double w[10];
  for (int i = 0; i < 10; ++i) {
    const int one_based = i + 1;
    if (one_based == 3 || one_based == 5 || one_based == 7) {
      w[i] = 2.0 * (1.1 * x[i] / (x[i] + 0.1) - 0.5);
    } else {
      w[i] = 2.0 * (x[i] - 0.5);
    }
  }
  double f = 0.0;
  for (int i = 0; i < 10; ++i) f += w[i];
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) f += w[i] * w[j];
  }
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      for (int k = j + 1; k < 5; ++k) f += w[i] * w[j] * w[k];
    }
  }
  return f + w[0] * w[1] * w[2] * w[3];
}

double mse_criterion(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truths) {
  require_same_length(predictions, truths);
  return (truths - predictions).squaredNorm() / static_cast<double>(truths.size());
}

double pva_criterion(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truths,
                     const Eigen::VectorXd& predictive_variances) {
  require_same_length(predictions, truths);
  require_same_length(predictions, predictive_variances);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < truths.size(); ++i) {
    const double v = predictive_variances(i);
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "predictive variance at index " << i << " is not positive (" << v << ")";
      throw InputError(msg.str());
    }
    const double e = truths(i) - predictions(i);
    sum += e * e / v;
  }
  return std::abs(std::log(sum / static_cast<double>(truths.size())));
}

}  // namespace krigmis
