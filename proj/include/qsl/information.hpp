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

#include <vector>

#include "qsl/dynamics.hpp"

namespace qsl {

struct SpeedOperators {
  HermitianOperator L;
  HermitianOperator L_coh;
  HermitianOperator L_inc;
  double F = 0.0;
  double F_coh = 0.0;
  double F_inc = 0.0;
  // Some unsupported level has a nonzero population rate: the speed bounds
  // then need the additive support correction.
  bool support_violation = false;
  // Weight of the derivative that lives entirely on unsupported pairs and
  // therefore cannot be expressed through L.
  double unsupported_drive = 0.0;
};

HermitianOperator sld(const TrajectoryPoint& point);
SpeedOperators speed_operators(const TrajectoryPoint& point);

// |sum over unsupported j of pdot_j (A_jj - <A>)|.
double support_correction(const TrajectoryPoint& point, const HermitianOperator& a);

double classical_fisher_povm(const TrajectoryPoint& point, const std::vector<HermitianOperator>& povm,
                             const ToleranceSet& tol = {});

}  // namespace qsl
