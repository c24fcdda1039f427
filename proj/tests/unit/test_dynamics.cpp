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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace qsl;
using namespace qsl::test;

namespace {

Generator dephasing(double kappa) {
  return Generator::constant(HermitianOperator::zero(2), {{2.0 * kappa, sz()}});
}

Generator rotation(double omega) { return Generator::constant(pauli::y() * (omega / 2.0)); }

Eigen::Vector3d bloch_of(const Matrix& rho) {
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

}  // namespace

TEST_CASE("dephasing contracts the x component at four times kappa") {
  const double kappa = 0.35, x = 0.6;
  const HermitianOperator d = lindblad_derivative(DensityMatrix::bloch(x, 0, 0), dephasing(kappa), 0.0);
  CHECK(dist(d.matrix(), -2.0 * kappa * x * sx()) < 1e-15);
  // the same thing written as a double commutator
  const Matrix rho = DensityMatrix::bloch(x, 0, 0).matrix();
  CHECK(dist(d.matrix(), -kappa * commutator(sz(), commutator(sz(), rho))) < 1e-15);
}

TEST_CASE("rotation about y moves the Bloch vector as x' = w z, z' = -w x") {
  const double omega = 1.7, x = 0.3, z = -0.5;
  const HermitianOperator d = lindblad_derivative(DensityMatrix::bloch(x, 0, z), rotation(omega), 0.0);
  const Eigen::Vector3d v = bloch_of(d.matrix());
  CHECK(v(0) == doctest::Approx(omega * z).epsilon(1e-14));
  CHECK(std::abs(v(1)) < 1e-15);
  CHECK(v(2) == doctest::Approx(-omega * x).epsilon(1e-14));
}

TEST_CASE("diagonal states are stationary under a diagonal Hamiltonian with dephasing") {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 0.7;
  rho(1, 1) = 0.3;
  const Generator gen = Generator::constant(pauli::z() * 0.8, {{0.5, sz()}});
  CHECK(max_abs(lindblad_derivative(DensityMatrix(rho), gen, 0.0).matrix()) < 1e-16);
}

TEST_CASE("generators reject negative rates and malformed jumps") {
  CHECK_THROWS_AS(Generator::constant(pauli::z(), {{-0.1, sz()}}), ContractError);
  CHECK_THROWS_AS(Generator::constant(pauli::z(), {{0.1, Matrix::Identity(3, 3)}}), ContractError);
  CHECK_THROWS_AS(lindblad_derivative(DensityMatrix::maximally_mixed(3), rotation(1.0), 0.0), ContractError);
}

TEST_CASE("random generators produce Hermitian traceless derivatives") {
  Rng rng(17);
  double worst_trace = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const Index d = 2 + n % 7;
    const DensityMatrix rho = random_full_rank_state(d, rng);
    const Generator gen = random_generator(d, rng);
    const Matrix raw = gen.apply(rho.matrix(), 0.0);
    REQUIRE(max_abs(raw - raw.adjoint()) < 1e-11);
    worst_trace = std::max(worst_trace, std::abs(raw.trace()));
  }
  CHECK(worst_trace < 1e-11);
}

TEST_CASE("one full rotation period returns to the start") {
  const double omega = 2.0;
  const Trajectory traj = evolve(DensityMatrix::bloch(0, 0, 1), rotation(omega), 2.0 * M_PI / omega, 2000);
  const Eigen::Vector3d end = bloch_of(traj.points.back().rho.matrix());
  CHECK((end - Eigen::Vector3d(0, 0, 1)).norm() < 1e-6);
  CHECK(traj.points.size() == 2001);
}

TEST_CASE("pure dephasing follows x0 exp(-4 kappa t)") {
  const double kappa = 0.2, x0 = 0.6;
  const Trajectory traj = evolve(DensityMatrix::bloch(x0, 0, 0), dephasing(kappa), 1.0 / kappa, 1000);
  const double x = bloch_of(traj.points.back().rho.matrix())(0);
  CHECK(std::abs(x - x0 * std::exp(-4.0)) < 1e-6);
}

TEST_CASE("the null generator keeps every point at the initial state") {
  Rng rng(2);
  const DensityMatrix rho0 = random_full_rank_state(4, rng);
  const Trajectory traj = evolve(rho0, Generator::null(4), 1.0, 10);
  for (const TrajectoryPoint& p : traj.points) {
    CHECK(dist(p.rho.matrix(), rho0.matrix()) < 1e-15);
    CHECK(max_abs(p.drho.matrix()) == 0.0);
  }
}

TEST_CASE("evolve contracts and divergence") {
  CHECK_THROWS_AS(evolve(DensityMatrix::bloch(0, 0, 1), rotation(1.0), 1.0, 1), ContractError);
  CHECK_THROWS_AS(evolve(DensityMatrix::bloch(0, 0, 1), rotation(1.0), 0.0, 10), ContractError);
  Matrix lower = Matrix::Zero(2, 2);
  lower(1, 0) = 1.0;
  const Generator stiff = Generator::constant(HermitianOperator::zero(2), {{100.0, lower}});
  CHECK_THROWS_AS(evolve(DensityMatrix::bloch(0, 0, 1), stiff, 1.0, 2), IntegrationDivergedError);
}

TEST_CASE("trajectory points carry a consistent split") {
  Rng rng(4);
  const Trajectory traj = evolve(random_full_rank_state(3, rng), random_generator(3, rng), 1.0, 100);
  double prev_t = -1.0;
  for (const TrajectoryPoint& p : traj.points) {
    CHECK(p.t > prev_t);
    prev_t = p.t;
    CHECK(dist(p.coh.matrix() + p.inc.matrix(), p.drho.matrix()) < 1e-12);
    CHECK(p.frame.to_frame(p.coh.matrix()).diagonal().cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(p.pdot.sum()) < 1e-10);
  }
}

TEST_CASE("split_derivative examples") {
  Rng rng(8);
  SUBCASE("purely incoherent") {
    const SpectralFrame f = spectral_decompose(DensityMatrix::bloch(0.6, 0, 0));
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = -0.3;
    diag(1, 1) = 0.3;
    const DerivativeSplit s = split_derivative(HermitianOperator::hermitized(f.from_frame(diag)), f);
    CHECK(max_abs(s.coh.matrix()) < 1e-15);
  }
  SUBCASE("purely coherent") {
    const DensityMatrix rho = random_full_rank_state(4, rng);
    const HermitianOperator h = random_hermitian(4, rng);
    const DerivativeSplit s = split_derivative(unitary_drive(h.matrix(), rho.matrix()), spectral_decompose(rho));
    CHECK(s.pdot.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("dephasing qubit in the x-z plane") {
    const double x = 0.5, z = -0.4, gamma = 0.6;
    const double r = std::hypot(x, z);
    const double r_dot = x * (-2.0 * gamma * x) / r;
    const DensityMatrix rho = DensityMatrix::bloch(x, 0, z);
    const HermitianOperator d = lindblad_derivative(rho, Generator::constant(HermitianOperator::zero(2), {{gamma, sz()}}), 0);
    const DerivativeSplit s = split_derivative(d, spectral_decompose(rho));
    CHECK(s.pdot(0) == doctest::Approx(r_dot / 2).epsilon(1e-13));
    CHECK(s.pdot(1) == doctest::Approx(-r_dot / 2).epsilon(1e-13));
  }
}

TEST_CASE("the split does not depend on eigenvector phases") {
  Rng rng(12);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  for (int n = 0; n < 500; ++n) {
    const Index d = 2 + n % 7;
    const DensityMatrix rho = random_full_rank_state(d, rng);
    const HermitianOperator drho = lindblad_derivative(rho, random_generator(d, rng), 0.0);
    SpectralFrame f = spectral_decompose(rho);
    const DerivativeSplit a = split_derivative(drho, f);
    for (Index j = 0; j < d; ++j) f.basis.col(j) *= std::polar(1.0, phase(rng));
    const DerivativeSplit b = split_derivative(drho, f);
    CHECK(dist(a.coh.matrix(), b.coh.matrix()) < 1e-11);
    CHECK(dist(a.inc.matrix(), b.inc.matrix()) < 1e-11);
    CHECK((a.pdot - b.pdot).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("effective Hamiltonian examples") {
  const SpectralFrame f = spectral_decompose(DensityMatrix::bloch(0, 0, 0.5));
  CHECK(max_abs(effective_hamiltonian(HermitianOperator::zero(2), f).h.matrix()) == 0.0);

  const double omega = 1.3;
  const Matrix h = 0.5 * omega * sy();
  const DensityMatrix rho = DensityMatrix::bloch(0, 0, 0.5);
  const EffectiveHamiltonian eff = effective_hamiltonian(unitary_drive(h, rho.matrix()), f);
  CHECK_FALSE(eff.degenerate_block);
  // equal up to a diagonal, and h has none
  CHECK(dist(eff.h.matrix(), h) < 1e-14);

  const SpectralFrame flat = spectral_decompose(DensityMatrix::maximally_mixed(2));
  CHECK_THROWS_AS(effective_hamiltonian(pauli::x(), flat), DegenerateDriveError);
}

TEST_CASE("analytic derivatives match central differences at second order") {
  const double omega = 1.1, kappa = 0.15;
  const Generator gen = Generator::constant(pauli::y() * (omega / 2), {{2 * kappa, sz()}});
  const DensityMatrix rho0 = DensityMatrix::bloch(0.2, 0.1, 0.9);
  std::vector<double> errors;
  for (std::size_t steps : {50, 100, 200, 400}) {
    const Trajectory traj = evolve(rho0, gen, 1.0, steps);
    const std::size_t mid = steps / 2;
    const Matrix fd = (traj.points[mid + 1].rho.matrix() - traj.points[mid - 1].rho.matrix()) / (2.0 * traj.dt);
    errors.push_back(dist(fd, traj.points[mid].drho.matrix()));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    CHECK(std::log2(errors[i - 1] / errors[i]) >= 1.9);
  }
}
