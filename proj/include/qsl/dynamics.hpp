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
#include <functional>
#include <vector>

#include "qsl/operators.hpp"

namespace qsl {

struct LindbladChannel {
  double rate = 0.0;
  Matrix jump;
};

class Generator {
 public:
  using HamiltonianFn = std::function<HermitianOperator(double)>;

  Generator(Index dim, HamiltonianFn hamiltonian, std::vector<LindbladChannel> channels = {});
  static Generator constant(const HermitianOperator& h, std::vector<LindbladChannel> channels = {});
  static Generator null(Index dim);

  Index dim() const { return dim_; }
  HermitianOperator hamiltonian(double t) const;
  const std::vector<LindbladChannel>& channels() const { return channels_; }

  // Raw right-hand side on an arbitrary (not necessarily valid) matrix.
  Matrix apply(const Matrix& rho, double t) const;

 private:
  Index dim_;
  HamiltonianFn hamiltonian_;
  std::vector<LindbladChannel> channels_;
  std::vector<Matrix> decay_;  // Gamma^dagger Gamma per channel
};

HermitianOperator lindblad_derivative(const DensityMatrix& rho, const Generator& gen, double t);

struct DerivativeSplit {
  HermitianOperator coh;
  HermitianOperator inc;
  RealVector pdot;
};

DerivativeSplit split_derivative(const HermitianOperator& drho, const SpectralFrame& frame);

struct TrajectoryPoint {
  double t = 0.0;
  DensityMatrix rho;
  SpectralFrame frame;
  HermitianOperator drho;
  HermitianOperator coh;
  HermitianOperator inc;
  RealVector pdot;
};

// Builds a point from a state and its derivative. Inside degenerate eigenvalue
// blocks the frame is rotated to diagonalize the projected derivative, so the
// labels follow the direction in which the degeneracy splits.
TrajectoryPoint make_point(double t, const DensityMatrix& rho, const HermitianOperator& drho,
                           const ToleranceSet& tol = {});
TrajectoryPoint make_point(double t, const DensityMatrix& rho, const HermitianOperator& drho,
                           const SpectralFrame& prev, const ToleranceSet& tol = {});

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double dt = 0.0;
  std::size_t projections = 0;  // steps where small negativity was clipped

  double horizon() const { return points.empty() ? 0.0 : points.back().t - points.front().t; }
  Index dim() const { return points.empty() ? 0 : points.front().rho.dim(); }
};

Matrix rk4_step(const Matrix& rho, const Generator& gen, double t, double dt);

// Hermitize, renormalize, and check positivity of an integrated state.
DensityMatrix restore_state(const Matrix& rho, std::size_t step, const ToleranceSet& tol,
                            bool* projected = nullptr);

Trajectory evolve(const DensityMatrix& rho0, const Generator& gen, double t_max, std::size_t steps,
                  const ToleranceSet& tol = {});

struct EffectiveHamiltonian {
  HermitianOperator h;
  bool degenerate_block = false;  // some pair was inside a degenerate block
};

EffectiveHamiltonian effective_hamiltonian(const HermitianOperator& coh, const SpectralFrame& frame,
                                           double gap_tol = ToleranceSet{}.gap,
                                           double drive_tol = ToleranceSet{}.drive);

}  // namespace qsl
