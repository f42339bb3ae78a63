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

namespace krigmis {

/// Exponentially scaled modified Bessel functions of the second kind at
/// orders nu and nu + 1: returns e^x K_nu(x) and e^x K_{nu+1}(x).
struct ScaledBesselK {
  double k_nu;
  double k_nu_plus_1;
};

/// K at a fixed order; order-dependent constants are computed once.
class BesselK {
 public:
  /// Requires a finite nu >= 0.
  explicit BesselK(double nu);

  double order() const { return nu_; }

  /// e^x K_nu(x) and e^x K_{nu+1}(x) for x > 0. Throws EvaluationError when
  /// the upward recurrence overflows.
  ScaledBesselK scaled(double x) const;

 private:
  double nu_;
  int steps_;  // nu = mu + steps_, |mu| <= 1/2
  double mu_;
  double gam1_, gam2_, gampl_, gammi_;
};

/// Requires nu >= 0 and x > 0. Throws EvaluationError when the upward
/// recurrence overflows.
ScaledBesselK bessel_k_scaled(double nu, double x);

/// K_nu(x) without scaling; underflows to 0 for large x.
double bessel_k(double nu, double x);

}  // namespace krigmis
