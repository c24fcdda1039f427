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

#include "qsl/information.hpp"
#include "support.hpp"

using namespace qsl;
using namespace qsl::test;

namespace {

TrajectoryPoint dephasing_point(double x, double kappa) {
  const DensityMatrix rho = DensityMatrix::bloch(x, 0, 0);
  const Generator gen = Generator::constant(HermitianOperator::zero(2), {{2.0 * kappa, sz()}});
  return make_point(0.0, rho, lindblad_derivative(rho, gen, 0.0));
}

// Qubit (a|0> + b|1>) next to an empty reset level |r>, jumps |r><0| and |r><1| at rate gamma.
TrajectoryPoint erasure_start(double a, double b, double gamma) {
  Eigen::Vector3cd psi(a, b, 0.0);
  const DensityMatrix rho = DensityMatrix::pure(psi);
  Matrix j0 = Matrix::Zero(3, 3), j1 = Matrix::Zero(3, 3);
  j0(2, 0) = 1.0;
  j1(2, 1) = 1.0;
  const Generator gen = Generator::constant(HermitianOperator::zero(3), {{gamma, j0}, {gamma, j1}});
  return make_point(0.0, rho, lindblad_derivative(rho, gen, 0.0));
}

HermitianOperator projector(const Eigen::VectorXcd& v) {
  return HermitianOperator::hermitized(v * v.adjoint());
}

}  // namespace

TEST_CASE("a vanishing derivative has a vanishing SLD") {
  Rng rng(1);
  const DensityMatrix rho = random_full_rank_state(3, rng);
  const TrajectoryPoint p = make_point(0.0, rho, HermitianOperator::zero(3));
  CHECK(max_abs(sld(p).matrix()) == 0.0);
  const SpeedOperators ops = speed_operators(p);
  CHECK(ops.F == 0.0);
  CHECK(ops.F_coh == 0.0);
  CHECK(ops.F_inc == 0.0);
  CHECK(max_abs(ops.L_coh.matrix()) == 0.0);
  CHECK(max_abs(ops.L_inc.matrix()) == 0.0);
}

TEST_CASE("SLD of the dephasing qubit is diagonal in the frame") {
  const double x = 0.6, kappa = 0.25;
  const TrajectoryPoint p = dephasing_point(x, kappa);
  const Matrix lf = p.frame.to_frame(sld(p).matrix());
  const double pp = (1 + x) / 2, pm = (1 - x) / 2;
  CHECK(lf(0, 0).real() == doctest::Approx(-2 * kappa * x / pp).epsilon(1e-13));
  CHECK(lf(1, 1).real() == doctest::Approx(2 * kappa * x / pm).epsilon(1e-13));
  CHECK(std::abs(lf(0, 1)) < 1e-15);

  const SpeedOperators ops = speed_operators(p);
  CHECK(ops.F_inc == doctest::Approx(16 * kappa * kappa * x * x / (1 - x * x)).epsilon(1e-13));
  CHECK(ops.F == doctest::Approx(ops.F_inc).epsilon(1e-15));
  CHECK(ops.F_coh < 1e-30);
}

TEST_CASE("pure states under a Hamiltonian: reconstruction and F = 4 var(H)") {
  Rng rng(6);
  for (int n = 0; n < 1000; ++n) {
    const Index d = 2 + n % 7;
    const DensityMatrix psi = random_pure_state(d, rng);
    const HermitianOperator h = random_hermitian(d, rng);
    const HermitianOperator drive = unitary_drive(h.matrix(), psi.matrix());
    const TrajectoryPoint p = make_point(0.0, psi, drive);
    const SpeedOperators ops = speed_operators(p);
    const Matrix& r = psi.matrix();
    CHECK(dist(0.5 * (ops.L.matrix() * r + r * ops.L.matrix()), drive.matrix()) < 1e-9);
    const double four_var = 4.0 * variance(psi, h);
    CHECK(std::abs(ops.F_coh - four_var) <= 1e-9 * four_var);
    CHECK(std::abs(ops.F - ops.F_coh) <= 1e-9 * four_var);
  }
}

TEST_CASE("support correction examples") {
  Rng rng(2);
  const DensityMatrix rho = random_full_rank_state(3, rng);
  const TrajectoryPoint full = make_point(0.0, rho, lindblad_derivative(rho, random_generator(3, rng), 0.0));
  CHECK(support_correction(full, random_hermitian(3, rng)) == 0.0);

  const double gamma = 0.8;
  const TrajectoryPoint erase = erasure_start(std::cos(M_PI / 8), std::sin(M_PI / 8), gamma);
  const SpeedOperators ops = speed_operators(erase);
  CHECK(ops.support_violation);
  Matrix rr = Matrix::Zero(3, 3);
  rr(2, 2) = 1.0;
  CHECK(support_correction(erase, HermitianOperator(rr)) == doctest::Approx(gamma).epsilon(1e-12));

  Matrix in_frame = random_hermitian(3, rng).matrix();
  in_frame.diagonal().setZero();
  const HermitianOperator off = HermitianOperator::hermitized(erase.frame.from_frame(in_frame));
  CHECK(support_correction(erase, off) < 1e-14);

  // sz has no weight on the reset level, yet its speed is set entirely by the level being filled
  Matrix z3 = Matrix::Zero(3, 3);
  z3.topLeftCorner(2, 2) = sz();
  const double z0 = std::cos(M_PI / 4);
  const TrajectoryPoint tilted = erasure_start(std::cos(M_PI / 8), std::sin(M_PI / 8), gamma);
  const double a_dot = real_trace(z3, tilted.drho.matrix());
  CHECK(a_dot == doctest::Approx(-gamma * z0).epsilon(1e-12));
  CHECK(support_correction(tilted, HermitianOperator(z3)) == doctest::Approx(gamma * z0).epsilon(1e-12));
}

TEST_CASE("classical Fisher information of fixed measurements") {
  const TrajectoryPoint p = dephasing_point(0.6, 0.3);
  const SpeedOperators ops = speed_operators(p);

  std::vector<HermitianOperator> eig;
  for (Index j = 0; j < 2; ++j) eig.push_back(projector(p.frame.basis.col(j)));
  CHECK(classical_fisher_povm(p, eig) == doctest::Approx(ops.F_inc).epsilon(1e-12));

  CHECK(classical_fisher_povm(p, {HermitianOperator::identity(2)}) == 0.0);

  Rng rng(4);
  for (int n = 0; n < 200; ++n) {
    CHECK(classical_fisher_povm(p, random_povm(2, 2 + n % 4, rng)) <= ops.F + 1e-9);
  }

  CHECK_THROWS_AS(classical_fisher_povm(p, {pauli::z()}), ContractError);
  CHECK_THROWS_AS(classical_fisher_povm(p, {HermitianOperator::identity(2) * 0.5}), ContractError);
}

TEST_CASE("a measurement outcome that is certain to be absent but is being populated is singular") {
  const TrajectoryPoint erase = erasure_start(0.6, 0.8, 1.0);
  Matrix rr = Matrix::Zero(3, 3);
  rr(2, 2) = 1.0;
  const HermitianOperator r(rr);
  CHECK_THROWS_AS(classical_fisher_povm(erase, {r, HermitianOperator::identity(3) - r}), SingularOutcomeError);
}

TEST_CASE("random open-system instances: reconstruction, additivity and orthogonality") {
  Rng rng(1);
  double worst_rec = 0.0, worst_add = 0.0, worst_orth = 0.0, worst_orth_rel = 0.0, worst_mean = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const Index d = 2 + n % 7;
    const DensityMatrix rho = random_full_rank_state(d, rng);
    const TrajectoryPoint p = make_point(0.0, rho, lindblad_derivative(rho, random_generator(d, rng), 0.0));
    const SpeedOperators ops = speed_operators(p);
    const Matrix& r = rho.matrix();
    worst_rec = std::max(worst_rec, dist(0.5 * (ops.L.matrix() * r + r * ops.L.matrix()), p.drho.matrix()));
    worst_add = std::max(worst_add, std::abs(ops.F - ops.F_coh - ops.F_inc) / std::max(1.0, ops.F));
    const double cov = std::abs(sym_covariance(rho, ops.L_coh, ops.L_inc));
    worst_orth = std::max(worst_orth, cov);
    worst_orth_rel = std::max(worst_orth_rel, cov / std::max(1.0, std::sqrt(ops.F_coh * ops.F_inc)));
    for (const HermitianOperator* l : {&ops.L, &ops.L_coh, &ops.L_inc}) {
      worst_mean = std::max(worst_mean, std::abs(rho.expectation(*l)) / (1.0 + std::sqrt(ops.F)));
    }
    REQUIRE(dist((ops.L_coh + ops.L_inc).matrix(), ops.L.matrix()) <= 1e-10 * (1.0 + max_abs(ops.L.matrix())));
  }
  CHECK(worst_rec < 1e-9);
  CHECK(worst_add < 1e-9);
  CHECK(worst_orth < 1e-10);
  CHECK(worst_orth_rel < 1e-12);
  CHECK(worst_mean < 1e-10);
}

TEST_CASE("coherent Fisher information stays below four energy variances without dissipation") {
  Rng rng(3);
  for (int n = 0; n < 2000; ++n) {
    const Index d = 2 + n % 7;
    const DensityMatrix rho = random_full_rank_state(d, rng);
    const HermitianOperator h = random_hermitian(d, rng);
    const SpeedOperators ops = speed_operators(make_point(0.0, rho, unitary_drive(h.matrix(), rho.matrix())));
    CHECK(ops.F_coh <= 4.0 * variance(rho, h) + 1e-9);
  }
}

TEST_CASE("Fisher informations do not depend on eigenvector phases") {
  Rng rng(10);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  for (int n = 0; n < 500; ++n) {
    const Index d = 2 + n % 7;
    const DensityMatrix rho = random_full_rank_state(d, rng);
    TrajectoryPoint p = make_point(0.0, rho, lindblad_derivative(rho, random_generator(d, rng), 0.0));
    const SpeedOperators a = speed_operators(p);
    for (Index j = 0; j < d; ++j) p.frame.basis.col(j) *= std::polar(1.0, phase(rng));
    const DerivativeSplit s = split_derivative(p.drho, p.frame);
    p.coh = s.coh;
    p.inc = s.inc;
    p.pdot = s.pdot;
    const SpeedOperators b = speed_operators(p);
    const double scale = std::max(1.0, a.F);
    CHECK(std::abs(a.F - b.F) <= 1e-10 * scale);
    CHECK(std::abs(a.F_coh - b.F_coh) <= 1e-10 * scale);
    CHECK(std::abs(a.F_inc - b.F_inc) <= 1e-10 * scale);
  }
}
