// Copyright 2026 The qsl Authors
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

#include <cstddef>
#include <vector>

#include "qsl/bounds.hpp"

namespace qsl {

// PSD square root through the eigendecomposition, clamping negative noise to 0.
Matrix psd_sqrt(const Matrix& m);

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);
double bures_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);
double bures_angle(const DensityMatrix& rho1, const DensityMatrix& rho2);

struct MetricConsistency {
  std::vector<double> spacing;  // sample spacing h for each stride
  std::vector<double> error;    // max |D_B^2/h^2 - (F(t) + F(t+h))/8|
  std::vector<double> line_element;  // mean D_B^2/h^2 at each spacing
  double order = 0.0;           // least-squares slope of log(error) vs log(h)
  std::size_t skipped = 0;      // pairs dropped because the rank changed
  bool stationary = false;      // every distance vanished
};

MetricConsistency metric_consistency(const Trajectory& traj, const std::vector<int>& strides = {1, 2, 4, 8, 16});

struct IntegratedReport {
  double horizon = 0.0;
  double path_length = 0.0;      // (1/2) int sqrt(F) dt
  double geodesic_length = 0.0;  // arccos sqrt(fidelity(rho_0, rho_tau))
  double divergence = 0.0;       // tau int F dt
  double divergence_coh = 0.0;
  double divergence_inc = 0.0;
  double speed_over_spread = 0.0;  // int |a_dot| / dA dt
  double total_change = 0.0;
  double total_change_coh = 0.0;
  double total_change_inc = 0.0;
  double change_bound = 0.0;             // int dA sqrt(F) dt
  double change_bound_divergence = 0.0;  // 2 sqrt(J mean dA^2)
  double change_bound_inc = 0.0;         // int dA_inc sqrt(F_inc) dt
  double change_bound_inc_divergence = 0.0;
  double change_bound_coh = 0.0;
  double change_bound_coh_divergence = 0.0;
  double support_correction = 0.0;  // int of the pointwise support corrections
  std::size_t flat_instants = 0;    // instants with dA < 1e-12 left out of speed_over_spread
};

// Trapezoidal quadrature over the trajectory grid. Every integrated inequality
// is checked; a violation throws BoundViolationError naming the instant.
IntegratedReport integrated_report(const Trajectory& traj, const HermitianOperator& a, double slack = 1e-7);

struct FidelitySpeedRecord {
  double max_pointwise_excess = 0.0;      // max(|dF/dt| - intermediate bound), should be <= 0
  double max_intermediate_excess = 0.0;   // max(intermediate - loose bound), should be <= 0
  double angle_end = 0.0;                 // arccos sqrt(F(tau))
  double integral_intermediate = 0.0;
  double integral_upper = 0.0;            // int sqrt(F/4) dt
  std::size_t strictly_tighter = 0;       // instants where the intermediate integrand is strictly smaller
  std::vector<double> survival;           // F_t = Tr(rho_0 rho_t)
  bool holds = true;
};

FidelitySpeedRecord fidelity_speed_check(const Trajectory& traj, double slack = 1e-9);

}  // namespace qsl
