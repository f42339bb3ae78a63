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

#include "krigmis/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "krigmis/error.hpp"

// Temme's series for x <= 2 and Steed's continued fraction for x > 2, both at
// the reduced order |mu| <= 1/2, followed by forward recurrence in the order.
// See Temme, J. Comput. Phys. 19 (1975) and Numerical Recipes 6.7.

namespace krigmis {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) and (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl,
                  double& gammi) {
  gampl = 1.0 / std::tgamma(1.0 + mu);
  gammi = 1.0 / std::tgamma(1.0 - mu);
  if (std::abs(mu) < 1e-3) {
    // Taylor coefficients of 1/Gamma(1+z).
    constexpr double b1 = 0.5772156649015329;
    constexpr double b2 = -0.6558780715202538;
    constexpr double b3 = -0.0420026350340952;
    constexpr double b4 = 0.1665386113822915;
    constexpr double b5 = -0.0421977345555443;
    const double m2 = mu * mu;
    gam1 = -(b1 + m2 * (b3 + m2 * b5));
    gam2 = 1.0 + m2 * (b2 + m2 * b4);
  } else {
    gam1 = (gammi - gampl) / (2.0 * mu);
    gam2 = (gammi + gampl) / 2.0;
  }
}

void series_small_x(double mu, double gam1, double gam2, double gampl,
                    double gammi, double x, double& k_mu, double& k_mu1) {
  const double x2 = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / gampl;
  double q = 0.5 / (e * gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i <= kMaxIter; ++i) {
    ff = (i * ff + p + q) / (i * i - mu2);
    c *= d / i;
    p /= i - mu;
    q /= i + mu;
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - i * ff);
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  const double scale = std::exp(x);
  k_mu = sum * scale;
  k_mu1 = sum1 * (2.0 / x) * scale;
}

void continued_fraction_large_x(double mu, double x, double& k_mu,
                                double& k_mu1) {
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i <= kMaxIter; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h = a1 * h;
  k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
}

}  // namespace

BesselK::BesselK(double nu) : nu_(nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) {
    throw InputError("bessel_k: order must be finite and nonnegative");
  }
  steps_ = static_cast<int>(nu + 0.5);
  mu_ = nu - steps_;
  temme_gammas(mu_, gam1_, gam2_, gampl_, gammi_);
}

ScaledBesselK BesselK::scaled(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InputError("bessel_k: argument must be finite and positive");
  }
  double k_mu, k_mu1;
  if (x <= 2.0) {
    series_small_x(mu_, gam1_, gam2_, gampl_, gammi_, x, k_mu, k_mu1);
  } else {
    continued_fraction_large_x(mu_, x, k_mu, k_mu1);
  }
  const double two_over_x = 2.0 / x;
  for (int i = 1; i <= steps_; ++i) {
    const double next = (mu_ + i) * two_over_x * k_mu1 + k_mu;
    k_mu = k_mu1;
    k_mu1 = next;
  }
  if (!std::isfinite(k_mu) || !std::isfinite(k_mu1)) {
    std::ostringstream msg;
    msg << "bessel_k: overflow evaluating K_nu at nu=" << nu_ << ", x=" << x;
    throw EvaluationError(msg.str());
  }
  return {k_mu, k_mu1};
}

ScaledBesselK bessel_k_scaled(double nu, double x) {
  return BesselK(nu).scaled(x);
}

double bessel_k(double nu, double x) {
  return bessel_k_scaled(nu, x).k_nu * std::exp(-x);
}

}  // namespace krigmis
