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
#include <optional>
#include <vector>

#include "qsl/dynamics.hpp"

namespace qsl {

struct SpeedupPolicy {
  HermitianOperator observable;
  std::optional<double> lambda;
  std::optional<double> norm_cap;
  int direction = +1;  // +1 drives a_dot_coh up, -1 drives it down

  static SpeedupPolicy with_lambda(const HermitianOperator& a, double lambda, int direction = +1);
  static SpeedupPolicy with_norm_cap(const HermitianOperator& a, double epsilon, int direction = +1);
};

struct SpeedupHamiltonian {
  HermitianOperator h;
  double lambda = 0.0;  // the scale actually used (solved for in norm-cap mode)
};

SpeedupHamiltonian synthesize_speedup(const SpectralFrame& frame, const SpeedupPolicy& policy,
                                      const ToleranceSet& tol = {});
HermitianOperator speedup_hamiltonian(const SpectralFrame& frame, const SpeedupPolicy& policy,
                                      const ToleranceSet& tol = {});

struct ErasureSample {
  double t = 0.0;
  double z_inc = 0.0, x_inc = 0.0;
  double z_enh = 0.0, x_enh = 0.0;
  std::optional<double> rate_inc;  // dz/dt / z, absent where |z| <= 1e-6
  std::optional<double> rate_enh;
};

struct ErasureComparison {
  std::vector<ErasureSample> samples;
  double max_rate_error_inc = 0.0;
  double max_rate_error_enh = 0.0;  // only before the enhanced z first reaches zero
  std::optional<double> crossing_time;
  bool enhanced_dominates = true;   // |z_enh| <= |z_inc| at every sample
};

// Qubit |0>, |1> plus a reset level |r>, erased at rate gamma; the enhanced run
// adds the norm-capped speedup Hamiltonian for sigma_z, re-synthesized each step.
// Throws BoundViolationError if either run departs from its closed-form decay rate.
ErasureComparison erasure_scenario(double a, double b, double gamma, double epsilon, double t_max,
                                   std::size_t steps, const ToleranceSet& tol = {});

}  // namespace qsl
