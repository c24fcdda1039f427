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

#include <cstdint>
#include <random>
#include <vector>

#include "qsl/dynamics.hpp"

namespace qsl {

using Rng = std::mt19937_64;

Matrix random_gaussian_matrix(Index rows, Index cols, Rng& rng);
Matrix random_unitary(Index dim, Rng& rng);
HermitianOperator random_hermitian(Index dim, Rng& rng, double scale = 1.0);
Eigen::VectorXcd random_state_vector(Index dim, Rng& rng);
DensityMatrix random_pure_state(Index dim, Rng& rng);
// Dirichlet(1,...,1) spectrum floored at `floor` and renormalized, in a Haar-random basis.
DensityMatrix random_full_rank_state(Index dim, Rng& rng, double floor = 10.0 * ToleranceSet{}.rank);
// Gaussian Hamiltonian plus 1-3 Gaussian jump operators with rates in [0, 1).
Generator random_generator(Index dim, Rng& rng);
// Rank-one POVM with `outcomes` elements (outcomes >= dim).
std::vector<HermitianOperator> random_povm(Index dim, Index outcomes, Rng& rng);

}  // namespace qsl
