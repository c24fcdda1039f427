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

#include <optional>
#include <vector>

#include "qsl/information.hpp"

namespace qsl {

struct ObservableSplit {
  HermitianOperator A;
  HermitianOperator A_coh;  // off-diagonal in the frame
  HermitianOperator A_inc;  // diagonal in the frame
  double dA = 0.0;
  double dA_coh = 0.0;
  double dA_inc = 0.0;
};

ObservableSplit split_observable(const HermitianOperator& a, const SpectralFrame& frame);

struct ObservableSpeeds {
  double a_dot = 0.0;
  double a_dot_coh = 0.0;
  double a_dot_inc = 0.0;
  // The same speeds from covariances with the speed operators; the
  // incoherent one includes the signed unsupported-level term.
  double cov_coh = 0.0;
  double cov_inc = 0.0;
};

// Throws ConsistencyError when the trace and covariance routes disagree.
ObservableSpeeds observable_speeds(const ObservableSplit& split, const TrajectoryPoint& point,
                                   const SpeedOperators& ops);

struct SpeedReport {
  double a_dot = 0.0, a_dot_coh = 0.0, a_dot_inc = 0.0;
  double dA = 0.0, dA_coh = 0.0, dA_inc = 0.0;
  double F = 0.0, F_coh = 0.0, F_inc = 0.0;
  double bound_cr = 0.0;
  double bound_coh = 0.0;
  double bound_inc = 0.0;
  double bound_upper = 0.0;        // min(|a_dot_coh| + bound_inc, |a_dot_inc| + bound_coh)
  double bound_upper_loose = 0.0;  // bound_coh + bound_inc
  double bound_lower = 0.0;        // floored at zero
  double bound_lower_raw = 0.0;
  double ratio = 1.0;
  double tau_a = 0.0, tau_coh = 0.0, tau_inc = 0.0;  // +inf for a vanishing rate
  double tau_info = 0.0, tau_info_coh = 0.0, tau_info_inc = 0.0;  // tau * sqrt(F)
  double support_corr = 0.0;
};

SpeedReport speed_report(const ObservableSplit& split, const TrajectoryPoint& point,
                         const SpeedOperators& ops, double support_corr,
                         const ToleranceSet& tol = {});

// The ratio bound_cr / bound_upper_loose written through the Lagrange identity.
double tightness_ratio_closed_form(double dA_coh, double dA_inc, double F_coh, double F_inc);

struct EntropyRate {
  double S = 0.0;
  double S_dot = 0.0;
  double dS = 0.0;
  double bound = 0.0;    // dS * sqrt(F_inc)
  double sie_cap = 0.0;  // sqrt((ln(d-1))^2/4 + 1)
  bool holds = true;
  bool cap_holds = true;
  bool support_flag = false;  // an unsupported level is being populated
};

EntropyRate entropy_rate_bound(const TrajectoryPoint& point, const SpeedOperators& ops);

struct HeatFlux {
  double flux = 0.0;           // Tr(drho H)
  double flux_coh = 0.0;       // Tr(coh H)
  double bound_inc = 0.0;      // dH_inc sqrt(F_inc)
  double bound_printed = 0.0;  // dH_inc sqrt(F_coh)
  double bound_coh = 0.0;      // dH_coh sqrt(F_coh)
  bool applicable = false;     // flux has no coherent contribution
  bool holds = true;           // |flux| <= bound_inc, checked only when applicable
};

HeatFlux heat_flux_bound(const TrajectoryPoint& point, const SpeedOperators& ops,
                         const HermitianOperator& h);

struct EnergyVarianceRecord {
  double t = 0.0;
  double F_coh = 0.0;
  double F_inc = 0.0;
  double var_h_sys = 0.0;  // reduced state
  double var_h_int = 0.0;  // joint state
  std::optional<double> var_h_eff;  // frame generator of the reduced state, when identifiable
  bool coh_holds = true;            // F_coh <= 4 var_h_sys
  bool inc_holds = true;            // F_inc <= 4 var_h_int
  bool inc_strict = true;           // F_inc < 4 var_h_int whenever F_inc > 1e-9
  bool eff_holds = true;            // F_coh <= 4 var_h_eff
  SpectralFrame reduced_frame;
};

struct JointHamiltonian {
  Factorization dims;
  HermitianOperator h_sys;
  HermitianOperator h_env;
  HermitianOperator h_int;

  HermitianOperator total() const;
};

EnergyVarianceRecord energy_variance_check(const TrajectoryPoint& joint, const JointHamiltonian& h,
                                           const SpectralFrame* prev_reduced = nullptr,
                                           double slack = 1e-8, const ToleranceSet& tol = {});

struct SpeedOperatorBasis {
  HermitianOperator L_coh;  // as in SpeedOperators; absent members stay zero
  HermitianOperator L_inc;
  bool has_coh = false;
  bool has_inc = false;
  std::vector<HermitianOperator> still;  // unit variance, or unit Frobenius norm if degenerate
  std::vector<bool> still_degenerate;
  double alpha_coh = 0.0;
  double alpha_inc = 0.0;
  double residual_speed = 0.0;
};

SpeedOperatorBasis speed_operator_basis(const SpeedOperators& ops, const TrajectoryPoint& point,
                                        const HermitianOperator* a = nullptr);

}  // namespace qsl
