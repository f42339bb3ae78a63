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

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "krigmis/bessel.hpp"
#include "krigmis/doe.hpp"

namespace krigmis {

enum class Family { PowerExponential, Matern };

const char* to_string(Family family);

/// Stationary anisotropic correlation function.
///
/// Power-exponential: R(h) = exp(-sum_i (|h_i| / l_i)^p), 0 < p <= 2.
/// Matern: R(h) = (2 sqrt(nu) |h|_l)^nu K_nu(2 sqrt(nu) |h|_l) / (Gamma(nu) 2^(nu-1))
/// with |h|_l = sqrt(sum_i h_i^2 / l_i^2).
class CorrelationModel {
 public:
  CorrelationModel(Family family, std::vector<double> lengths, double shape);

  static CorrelationModel power_exponential(std::vector<double> lengths, double power);
  static CorrelationModel exponential(std::vector<double> lengths);
  static CorrelationModel gaussian(std::vector<double> lengths);
  static CorrelationModel matern(std::vector<double> lengths, double nu);

  Family family() const { return family_; }
  const std::vector<double>& lengths() const { return lengths_; }
  double shape() const { return shape_; }
  std::size_t dim() const { return lengths_.size(); }

  CorrelationModel with_lengths(std::vector<double> lengths) const;
  CorrelationModel with_shape(double shape) const;

  /// R(a - b) for two points of dimension dim(); no validation.
  double between(const double* a, const double* b) const;

  /// R as a function of the scaled Matern radius |h|_l.
  double matern_of_radius(double radius) const;
  /// dR/d|h|_l for the Matern family.
  double matern_radius_derivative(double radius) const;

  bool operator==(const CorrelationModel& other) const {
    return family_ == other.family_ && lengths_ == other.lengths_ &&
           shape_ == other.shape_;
  }

 private:
  Family family_;
  std::vector<double> lengths_;
  double shape_;
  // Matern constants.
  double scale_ = 0.0;       // 2 sqrt(nu)
  double log_norm_ = 0.0;    // -log Gamma(nu) - (nu - 1) log 2
  std::shared_ptr<const BesselK> k_nu_;
  std::shared_ptr<const BesselK> k_nu_minus_1_;
};

struct Nugget {
  double tau2 = 1e-8;
  explicit Nugget(double value = 1e-8);
};

/// R(h). Throws InputError for non-finite or wrongly sized h and
/// EvaluationError when the Bessel evaluation overflows.
double correlation(const CorrelationModel& model, std::span<const double> h);

/// Step of the fourth-order central difference used for the Matern shape derivative.
double shape_derivative_step(const CorrelationModel& model);

/// (dR/dlog l_1, ..., dR/dlog l_d, dR/dshape) at h. The Matern shape
/// derivative is obtained by central differences.
Eigen::VectorXd correlation_gradient(const CorrelationModel& model,
                                     std::span<const double> h);

/// Gamma + tau2 I together with the certificate that it is positive definite.
struct RegularizedCorrelation {
  Eigen::MatrixXd matrix;
  Eigen::LLT<Eigen::MatrixXd> cholesky;
  double nugget = 0.0;  // tau2 actually used
};

/// Correlation matrix of the design without nugget (unit diagonal).
Eigen::MatrixXd assemble_correlation(const CorrelationModel& model,
                                     const PointMatrix& points);

/// Cross-correlations R(x_j - x0) between the design rows and x0.
Eigen::VectorXd cross_correlation(const CorrelationModel& model,
                                  const PointMatrix& points,
                                  std::span<const double> x0);

/// Gamma + tau2 I, escalating tau2 tenfold up to 1e-4 while Cholesky fails.
/// Throws InputError on duplicate rows, ConditioningError when escalation is
/// exhausted.
RegularizedCorrelation corr_matrix(const CorrelationModel& model,
                                   const Design& design, const Nugget& nugget);

/// Entrywise derivatives dGamma/dlog l_i (i < d) and dGamma/dshape (last).
/// The nugget does not depend on the hyper-parameters.
std::vector<Eigen::MatrixXd> correlation_matrix_gradients(
    const CorrelationModel& model, const PointMatrix& points,
    bool with_shape);

}  // namespace krigmis
