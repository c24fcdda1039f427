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

#include "qsl/dynamics.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace qsl {

Generator::Generator(Index dim, HamiltonianFn hamiltonian, std::vector<LindbladChannel> channels)
    : dim_(dim), hamiltonian_(std::move(hamiltonian)), channels_(std::move(channels)) {
  if (dim_ <= 0) throw ContractError("generator dimension must be positive");
  if (!hamiltonian_) throw ContractError("generator needs a Hamiltonian callable");
  decay_.reserve(channels_.size());
  for (std::size_t a = 0; a < channels_.size(); ++a) {
    const auto& ch = channels_[a];
    if (!(ch.rate >= 0.0) || !std::isfinite(ch.rate)) {
      throw ContractError("channel " + std::to_string(a) + " has negative or non-finite rate");
    }
    if (ch.jump.rows() != dim_ || ch.jump.cols() != dim_) {
      throw ContractError("channel " + std::to_string(a) + " jump operator has the wrong shape");
    }
    decay_.push_back(ch.jump.adjoint() * ch.jump);
  }
}

Generator Generator::constant(const HermitianOperator& h, std::vector<LindbladChannel> channels) {
  return Generator(h.dim(), [h](double) { return h; }, std::move(channels));
}

Generator Generator::null(Index dim) { return constant(HermitianOperator::zero(dim)); }

HermitianOperator Generator::hamiltonian(double t) const {
  HermitianOperator h = hamiltonian_(t);
  if (h.dim() != dim_) throw ContractError("Hamiltonian callable returned the wrong dimension");
  return h;
}

Matrix Generator::apply(const Matrix& rho, double t) const {
  const Matrix h = hamiltonian(t).matrix();
  Matrix out = -kI * (h * rho - rho * h);
  for (std::size_t a = 0; a < channels_.size(); ++a) {
    const auto& ch = channels_[a];
    if (ch.rate == 0.0) continue;
    out += ch.rate * (ch.jump * rho * ch.jump.adjoint() - 0.5 * (decay_[a] * rho + rho * decay_[a]));
  }
  return out;
}

HermitianOperator lindblad_derivative(const DensityMatrix& rho, const Generator& gen, double t) {
  if (rho.dim() != gen.dim()) throw ContractError("state and generator dimensions differ");
  return HermitianOperator::hermitized(gen.apply(rho.matrix(), t));
}

DerivativeSplit split_derivative(const HermitianOperator& drho, const SpectralFrame& frame) {
  if (drho.dim() != frame.dim()) throw ContractError("derivative and frame dimensions differ");
  const Matrix d = frame.to_frame(drho.matrix());
  DerivativeSplit s;
  s.pdot = d.diagonal().real();
  const Matrix inc = frame.from_frame(s.pdot.cast<Complex>().asDiagonal());
  s.inc = HermitianOperator::hermitized(inc);
  s.coh = HermitianOperator::hermitized(drho.matrix() - s.inc.matrix());
  return s;
}

namespace {

void refine_degenerate_blocks(SpectralFrame& frame, const Matrix& drho, double degeneracy) {
  const Index d = frame.dim();
  Index start = 0;
  while (start < d) {
    Index end = start + 1;
    while (end < d &&
           std::abs(frame.probabilities(end - 1) - frame.probabilities(end)) < degeneracy) {
      ++end;
    }
    const Index m = end - start;
    if (m > 1) {
      const Matrix vb = frame.basis.middleCols(start, m);
      const Matrix sub = hermitian_part(vb.adjoint() * drho * vb);
      Eigen::SelfAdjointEigenSolver<Matrix> es(sub);
      for (Index c = 0; c < m; ++c) {
        Eigen::VectorXcd v = vb * es.eigenvectors().col(m - 1 - c);
        fix_phase(v);
        frame.basis.col(start + c) = v;
      }
    }
    start = end;
  }
}

TrajectoryPoint assemble(double t, const DensityMatrix& rho, const HermitianOperator& drho,
                         SpectralFrame frame) {
  DerivativeSplit s = split_derivative(drho, frame);
  TrajectoryPoint p;
  p.t = t;
  p.rho = rho;
  p.frame = std::move(frame);
  p.drho = drho;
  p.coh = std::move(s.coh);
  p.inc = std::move(s.inc);
  p.pdot = std::move(s.pdot);
  return p;
}

}  // namespace

TrajectoryPoint make_point(double t, const DensityMatrix& rho, const HermitianOperator& drho,
                           const ToleranceSet& tol) {
  if (drho.dim() != rho.dim()) throw ContractError("state and derivative dimensions differ");
  SpectralFrame frame = spectral_decompose(rho, tol);
  refine_degenerate_blocks(frame, drho.matrix(), tol.degeneracy);
  return assemble(t, rho, drho, std::move(frame));
}

TrajectoryPoint make_point(double t, const DensityMatrix& rho, const HermitianOperator& drho,
                           const SpectralFrame& prev, const ToleranceSet& tol) {
  if (drho.dim() != rho.dim()) throw ContractError("state and derivative dimensions differ");
  SpectralFrame frame = spectral_decompose(rho, tol);
  refine_degenerate_blocks(frame, drho.matrix(), tol.degeneracy);
  return assemble(t, rho, drho, align_frame(frame, prev, tol));
}

Matrix rk4_step(const Matrix& rho, const Generator& gen, double t, double dt) {
  const Matrix k1 = gen.apply(rho, t);
  const Matrix k2 = gen.apply(rho + 0.5 * dt * k1, t + 0.5 * dt);
  const Matrix k3 = gen.apply(rho + 0.5 * dt * k2, t + 0.5 * dt);
  const Matrix k4 = gen.apply(rho + dt * k3, t + dt);
  return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

DensityMatrix restore_state(const Matrix& rho, std::size_t step, const ToleranceSet& tol,
                            bool* projected) {
  Matrix m = hermitian_part(rho);
  m /= m.trace().real();
  Eigen::SelfAdjointEigenSolver<Matrix> check(m, Eigen::EigenvaluesOnly);
  const double lo = check.eigenvalues().minCoeff();
  if (!std::isfinite(lo) || lo < -tol.divergence) throw IntegrationDivergedError(step, lo);
  bool clipped = false;
  if (lo < -tol.psd) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    RealVector ev = es.eigenvalues().cwiseMax(0.0);
    ev /= ev.sum();
    m = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    clipped = true;
  }
  if (projected) *projected = clipped;
  return DensityMatrix(HermitianOperator::hermitized(m), tol);
}

Trajectory evolve(const DensityMatrix& rho0, const Generator& gen, double t_max, std::size_t steps,
                  const ToleranceSet& tol) {
  if (steps < 2) throw ContractError("evolve needs at least 2 steps");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ContractError("t_max must be positive");
  if (rho0.dim() != gen.dim()) throw ContractError("state and generator dimensions differ");

  Trajectory traj;
  traj.dt = t_max / static_cast<double>(steps);
  traj.points.reserve(steps + 1);

  DensityMatrix state = rho0;
  Matrix raw = rho0.matrix();
  for (std::size_t n = 0; n <= steps; ++n) {
    const double t = static_cast<double>(n) * traj.dt;
    if (n > 0) {
      raw = rk4_step(raw, gen, t - traj.dt, traj.dt);
      bool projected = false;
      state = restore_state(raw, n, tol, &projected);
      if (projected) ++traj.projections;
      raw = state.matrix();
    }
    const HermitianOperator drho = lindblad_derivative(state, gen, t);
    if (traj.points.empty()) {
      traj.points.push_back(make_point(t, state, drho, tol));
    } else {
      traj.points.push_back(make_point(t, state, drho, traj.points.back().frame, tol));
    }
  }
  return traj;
}

EffectiveHamiltonian effective_hamiltonian(const HermitianOperator& coh, const SpectralFrame& frame,
                                           double gap_tol, double drive_tol) {
  if (coh.dim() != frame.dim()) throw ContractError("coherent part and frame dimensions differ");
  const Index d = frame.dim();
  const Matrix c = frame.to_frame(coh.matrix());
  Matrix h = Matrix::Zero(d, d);
  EffectiveHamiltonian out;
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < d; ++k) {
      if (j == k) continue;
      const double gap = frame.probabilities(k) - frame.probabilities(j);
      if (std::abs(gap) >= gap_tol) {
        h(j, k) = kI * c(j, k) / gap;
      } else if (std::abs(c(j, k)) > drive_tol) {
        throw DegenerateDriveError("coherent drive between levels " + std::to_string(j) + " and " +
                                   std::to_string(k) + " inside a degenerate block");
      } else {
        out.degenerate_block = true;
      }
    }
  }
  out.h = HermitianOperator::hermitized(frame.from_frame(h));
  return out;
}

}  // namespace qsl
