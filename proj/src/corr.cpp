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

#include "krigmis/corr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krigmis/error.hpp"

namespace krigmis {

const char* to_string(Family family) {
  switch (family) {
    case Family::PowerExponential:
      return "power_exponential";
    case Family::Matern:
      return "matern";
  }
  return "unknown";
}

CorrelationModel::CorrelationModel(Family family, std::vector<double> lengths,
                                   double shape)
    : family_(family), lengths_(std::move(lengths)), shape_(shape) {
  if (lengths_.empty()) {
    throw InputError("correlation model needs at least one length");
  }
  for (double l : lengths_) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw InputError("correlation lengths must be finite and positive");
    }
  }
  if (!(shape_ > 0.0) || !std::isfinite(shape_)) {
    throw InputError("correlation shape must be finite and positive");
  }
  if (family_ == Family::PowerExponential && shape_ > 2.0) {
    throw InputError("power-exponential exponent must lie in (0, 2]");
  }
  if (family_ == Family::Matern) {
    scale_ = 2.0 * std::sqrt(shape_);
    log_norm_ = -std::lgamma(shape_) - (shape_ - 1.0) * std::log(2.0);
    k_nu_ = std::make_shared<const BesselK>(shape_);
    k_nu_minus_1_ = std::make_shared<const BesselK>(std::abs(shape_ - 1.0));
  }
}

CorrelationModel CorrelationModel::power_exponential(std::vector<double> lengths,
                                                     double power) {
  return {Family::PowerExponential, std::move(lengths), power};
}

CorrelationModel CorrelationModel::exponential(std::vector<double> lengths) {
  return power_exponential(std::move(lengths), 1.0);
}

CorrelationModel CorrelationModel::gaussian(std::vector<double> lengths) {
  return power_exponential(std::move(lengths), 2.0);
}

CorrelationModel CorrelationModel::matern(std::vector<double> lengths, double nu) {
  return {Family::Matern, std::move(lengths), nu};
}

CorrelationModel CorrelationModel::with_lengths(std::vector<double> lengths) const {
  return {family_, std::move(lengths), shape_};
}

CorrelationModel CorrelationModel::with_shape(double shape) const {
  return {family_, lengths_, shape};
}

double CorrelationModel::matern_of_radius(double radius) const {
  if (radius == 0.0) return 1.0;
  const double x = scale_ * radius;
  const double k = k_nu_->scaled(x).k_nu;
  const double value = std::exp(log_norm_ + shape_ * std::log(x) - x + std::log(k));
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "Matern correlation not representable for nu=" << shape_;
    throw EvaluationError(msg.str());
  }
  return std::min(value, 1.0);
}

double CorrelationModel::matern_radius_derivative(double radius) const {
  // d/dx [x^nu K_nu(x)] = -x^nu K_{nu-1}(x) and K_{-a} = K_a.
  if (radius == 0.0 && shape_ > 0.5) return 0.0;
  const double x = std::max(scale_ * radius, 1e-300);
  const double k = k_nu_minus_1_->scaled(x).k_nu;
  return -scale_ * std::exp(log_norm_ + shape_ * std::log(x) - x + std::log(k));
}

double CorrelationModel::between(const double* a, const double* b) const {
  const std::size_t d = lengths_.size();
  if (family_ == Family::PowerExponential) {
    double sum = 0.0;
    if (shape_ == 2.0) {
      for (std::size_t i = 0; i < d; ++i) {
        const double t = (a[i] - b[i]) / lengths_[i];
        sum += t * t;
      }
    } else if (shape_ == 1.0) {
      for (std::size_t i = 0; i < d; ++i) sum += std::abs(a[i] - b[i]) / lengths_[i];
    } else {
      for (std::size_t i = 0; i < d; ++i) {
        sum += std::pow(std::abs(a[i] - b[i]) / lengths_[i], shape_);
      }
    }
    return std::exp(-sum);
  }
  double r2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = (a[i] - b[i]) / lengths_[i];
    r2 += t * t;
  }
  return matern_of_radius(std::sqrt(r2));
}

Nugget::Nugget(double value) : tau2(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw InputError("nugget must be finite and nonnegative");
  }
}

namespace {

void check_lag(const CorrelationModel& model, std::span<const double> h) {
  if (h.size() != model.dim()) {
    throw InputError("lag dimension does not match the correlation model");
  }
  for (double v : h) {
    if (!std::isfinite(v)) throw InputError("lag vector must be finite");
  }
}

// Gradient at lag h into out[0..d] (d log-lengths, then shape).
// Fourth-order central difference in nu of the Matern correlation.
struct ShapeStencil {
  explicit ShapeStencil(const CorrelationModel& model)
      : step(shape_derivative_step(model)),
        plus1(model.with_shape(model.shape() + step)),
        minus1(model.with_shape(model.shape() - step)),
        plus2(model.with_shape(model.shape() + 2.0 * step)),
        minus2(model.with_shape(model.shape() - 2.0 * step)) {}

  double derivative(double radius) const {
    const double near = plus1.matern_of_radius(radius) - minus1.matern_of_radius(radius);
    const double far = plus2.matern_of_radius(radius) - minus2.matern_of_radius(radius);
    return (8.0 * near - far) / (12.0 * step);
  }

  double step;
  CorrelationModel plus1, minus1, plus2, minus2;
};

void gradient_into(const CorrelationModel& model, const double* h,
                   const ShapeStencil* stencil, double* out) {
  const std::size_t d = model.dim();
  const auto& lengths = model.lengths();
  if (model.family() == Family::PowerExponential) {
    const double p = model.shape();
    double sum = 0.0;
    double shape_sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double t = std::abs(h[i]) / lengths[i];
      const double tp = t == 0.0 ? 0.0 : std::pow(t, p);
      out[i] = tp;
      sum += tp;
      if (t > 0.0) shape_sum += tp * std::log(t);
    }
    const double r = std::exp(-sum);
    for (std::size_t i = 0; i < d; ++i) out[i] *= r * p;
    out[d] = -r * shape_sum;
    return;
  }
  double r2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = h[i] / lengths[i];
    out[i] = t * t;
    r2 += t * t;
  }
  const double radius = std::sqrt(r2);
  if (radius == 0.0) {
    std::fill(out, out + d + 1, 0.0);
    return;
  }
  // d|h|_l / dlog l_i = -(h_i / l_i)^2 / |h|_l
  const double dr = model.matern_radius_derivative(radius);
  for (std::size_t i = 0; i < d; ++i) out[i] = -dr * out[i] / radius;
  out[d] = stencil == nullptr ? 0.0 : stencil->derivative(radius);
}

}  // namespace

double correlation(const CorrelationModel& model, std::span<const double> h) {
  check_lag(model, h);
  std::vector<double> zero(h.size(), 0.0);
  return model.between(h.data(), zero.data());
}

double shape_derivative_step(const CorrelationModel& model) {
  return std::min(1e-3 * std::max(model.shape(), 1.0), 0.25 * model.shape());
}

Eigen::VectorXd correlation_gradient(const CorrelationModel& model,
                                     std::span<const double> h) {
  check_lag(model, h);
  const std::size_t d = model.dim();
  Eigen::VectorXd grad(static_cast<Eigen::Index>(d + 1));
  if (model.family() == Family::Matern) {
    const ShapeStencil stencil(model);
    gradient_into(model, h.data(), &stencil, grad.data());
  } else {
    gradient_into(model, h.data(), nullptr, grad.data());
  }
  return grad;
}

Eigen::MatrixXd assemble_correlation(const CorrelationModel& model,
                                     const PointMatrix& points) {
  if (static_cast<std::size_t>(points.cols()) != model.dim()) {
    throw InputError("design dimension does not match the correlation model");
  }
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd gamma(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index j = 0; j < n; ++j) {
    gamma(j, j) = 1.0;
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const double r = model.between(points.row(j).data(), points.row(k).data());
      gamma(j, k) = r;
      gamma(k, j) = r;
    }
  }
  return gamma;
}

Eigen::VectorXd cross_correlation(const CorrelationModel& model,
                                  const PointMatrix& points,
                                  std::span<const double> x0) {
  if (x0.size() != model.dim() ||
      static_cast<std::size_t>(points.cols()) != model.dim()) {
    throw InputError("prediction point dimension does not match the model");
  }
  for (double v : x0) {
    if (!std::isfinite(v)) throw InputError("prediction point must be finite");
  }
  Eigen::VectorXd gamma(points.rows());
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    gamma(j) = model.between(points.row(j).data(), x0.data());
  }
  return gamma;
}

RegularizedCorrelation corr_matrix(const CorrelationModel& model,
                                   const Design& design, const Nugget& nugget) {
  if (design.size() == 0) throw InputError("empty design");
  if (has_duplicate_rows(design.points)) {
    throw InputError("design contains duplicate rows");
  }
  RegularizedCorrelation out;
  out.matrix = assemble_correlation(model, design.points);
  constexpr double kMaxNugget = 1e-4;
  double tau2 = nugget.tau2;
  for (;;) {
    Eigen::MatrixXd regularized = out.matrix;
    regularized.diagonal().array() += tau2;
    Eigen::LLT<Eigen::MatrixXd> llt(regularized);
    if (llt.info() == Eigen::Success) {
      out.matrix = std::move(regularized);
      out.cholesky = std::move(llt);
      out.nugget = tau2;
      return out;
    }
    const double next = tau2 > 0.0 ? 10.0 * tau2 : 1e-12;
    if (next > kMaxNugget * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "correlation matrix not positive definite up to nugget " << tau2;
      throw ConditioningError(msg.str(), tau2);
    }
    tau2 = next;
  }
}

std::vector<Eigen::MatrixXd> correlation_matrix_gradients(
    const CorrelationModel& model, const PointMatrix& points, bool with_shape) {
  const std::size_t d = model.dim();
  if (static_cast<std::size_t>(points.cols()) != d) {
    throw InputError("design dimension does not match the correlation model");
  }
  const Eigen::Index n = points.rows();
  const std::size_t count = d + (with_shape ? 1 : 0);
  std::vector<Eigen::MatrixXd> grads(count, Eigen::MatrixXd::Zero(n, n));

  const bool matern_shape = with_shape && model.family() == Family::Matern;
  std::optional<ShapeStencil> stencil;
  if (matern_shape) stencil.emplace(model);

#pragma omp parallel
  {
    std::vector<double> lag(d), g(d + 1);
#pragma omp for schedule(dynamic, 8)
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = j + 1; k < n; ++k) {
        for (std::size_t i = 0; i < d; ++i) lag[i] = points(j, i) - points(k, i);
        gradient_into(model, lag.data(), stencil ? &*stencil : nullptr, g.data());
        for (std::size_t i = 0; i < count; ++i) {
          grads[i](j, k) = g[i];
          grads[i](k, j) = g[i];
        }
      }
    }
  }
  return grads;
}

}  // namespace krigmis
