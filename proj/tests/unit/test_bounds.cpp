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

#include "qsl/bounds.hpp"
#include "support.hpp"

using namespace qsl;
using namespace qsl::test;

namespace {

TrajectoryPoint point_under(const DensityMatrix& rho, const Generator& gen) {
  return make_point(0.0, rho, lindblad_derivative(rho, gen, 0.0));
}

Generator dephasing(double kappa, const HermitianOperator& h = HermitianOperator::zero(2)) {
  return Generator::constant(h, {{2.0 * kappa, sz()}});
}

SpeedReport report(const TrajectoryPoint& p, const HermitianOperator& a) {
  return speed_report(split_observable(a, p.frame), p, speed_operators(p), support_correction(p, a));
}

struct Instance {
  DensityMatrix rho;
  TrajectoryPoint point;
  SpeedOperators ops;
};

Instance random_instance(Index d, Rng& rng) {
  const DensityMatrix rho = random_full_rank_state(d, rng);
  TrajectoryPoint p = point_under(rho, random_generator(d, rng));
  SpeedOperators ops = speed_operators(p);
  return {rho, std::move(p), std::move(ops)};
}

}  // namespace

TEST_CASE("observable split examples") {
  const DensityMatrix tilted = DensityMatrix::bloch(0.6, 0, 0);
  const SpectralFrame f = spectral_decompose(tilted);
  const ObservableSplit commuting = split_observable(pauli::x(), f);
  CHECK(max_abs(commuting.A_coh.matrix()) < 1e-15);
  CHECK(commuting.dA_coh == 0.0);

  const ObservableSplit z = split_observable(pauli::z(), f);
  CHECK(max_abs(z.A_inc.matrix()) < 1e-15);
  CHECK(dist(z.A_coh.matrix(), sz()) < 1e-15);

  Rng rng(5);
  for (int n = 0; n < 1000; ++n) {
    const Index d = 2 + n % 7;
    const DensityMatrix rho = random_full_rank_state(d, rng);
    const HermitianOperator a = random_hermitian(d, rng);
    const ObservableSplit s = split_observable(a, spectral_decompose(rho));
    const double var = variance(rho, a);
    CHECK(std::abs(var - variance(rho, s.A_coh) - variance(rho, s.A_inc)) <= 1e-9 * std::max(1.0, var));
    CHECK(std::abs(rho.expectation(s.A_coh)) < 1e-10);
    CHECK(dist(s.A_coh.matrix() + s.A_inc.matrix(), a.matrix()) < 1e-11);
  }
}

TEST_CASE("observable speeds examples") {
  const double omega = 1.4;
  const TrajectoryPoint unitary =
      point_under(DensityMatrix::bloch(0, 0, 1), Generator::constant(pauli::y() * (omega / 2)));
  const SpeedReport r = report(unitary, pauli::x());
  CHECK(r.a_dot == doctest::Approx(omega).epsilon(1e-13));
  CHECK(std::abs(r.a_dot_inc) < 1e-15);
  CHECK(r.bound_cr == doctest::Approx(omega).epsilon(1e-12));
  CHECK(r.bound_upper == doctest::Approx(omega).epsilon(1e-12));

  Rng rng(3);
  const DensityMatrix rho = random_full_rank_state(3, rng);
  const SpeedReport still = report(make_point(0.0, rho, HermitianOperator::zero(3)), random_hermitian(3, rng));
  CHECK(still.a_dot == 0.0);
  CHECK(still.a_dot_coh == 0.0);
  CHECK(still.a_dot_inc == 0.0);

  const double x = 0.6, kappa = 0.2;
  const SpeedReport deph = report(point_under(DensityMatrix::bloch(x, 0, 0), dephasing(kappa)), pauli::x());
  CHECK(deph.a_dot == doctest::Approx(-4 * kappa * x).epsilon(1e-13));
  CHECK(deph.a_dot_inc == doctest::Approx(-4 * kappa * x).epsilon(1e-13));
}

TEST_CASE("a corrupted frame is caught by the two speed routes") {
  Rng rng(14);
  Instance in = random_instance(4, rng);
  TrajectoryPoint bad = in.point;
  bad.frame.basis = random_unitary(4, rng);
  const HermitianOperator a = random_hermitian(4, rng);
  CHECK_THROWS_AS(observable_speeds(split_observable(a, bad.frame), bad, in.ops), ConsistencyError);
}

TEST_CASE("diagonal observables under purely incoherent dynamics have ratio one") {
  const TrajectoryPoint p = point_under(DensityMatrix::bloch(0, 0, 0.4), Generator::constant(
      HermitianOperator::zero(2), {{0.7, mat2(0, 0, 1, 0)}}));
  const SpeedReport r = report(p, pauli::z());
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.bound_cr == doctest::Approx(r.bound_inc).epsilon(1e-14));
  CHECK(r.bound_coh == 0.0);
}

TEST_CASE("tightness ratio against its closed form") {
  Rng rng(19);
  for (int n = 0; n < 2000; ++n) {
    const Index d = 2 + n % 7;
    Instance in = random_instance(d, rng);
    const SpeedReport r = report(in.point, random_hermitian(d, rng));
    const double num = r.dA_coh * std::sqrt(r.F_inc) - r.dA_inc * std::sqrt(r.F_coh);
    const double den = r.dA_coh * std::sqrt(r.F_coh) + r.dA_inc * std::sqrt(r.F_inc);
    const double oracle = std::sqrt(1.0 + num * num / (den * den));
    CHECK(std::abs(r.ratio - oracle) < 1e-10);
    CHECK(r.ratio >= 1.0 - 1e-12);
  }
}

TEST_CASE("the bound chain on random open-system instances") {
  Rng rng(23);
  for (int n = 0; n < 10000; ++n) {
    const Index d = 2 + n % 7;
    Instance in = random_instance(d, rng);
    const SpeedReport r = report(in.point, random_hermitian(d, rng));
    const double s = 1e-9 * (1.0 + r.bound_cr);
    const double a = std::abs(r.a_dot);
    REQUIRE(r.bound_lower <= a + s);
    REQUIRE(a <= r.bound_upper + s);
    REQUIRE(r.bound_upper <= r.bound_upper_loose + s);
    REQUIRE(r.bound_upper_loose <= r.bound_cr + s);
    REQUIRE(std::abs(r.a_dot_coh) <= r.bound_coh + 1e-9);
    REQUIRE(std::abs(r.a_dot_inc) <= r.bound_inc + 1e-9);
    REQUIRE(std::abs(r.a_dot - r.a_dot_coh - r.a_dot_inc) <= 1e-10 * (1.0 + a));
    const double floor = 1e-10 * (1.0 + r.bound_cr);
    if (std::abs(r.a_dot) > floor) REQUIRE(r.tau_info >= 1.0 - 1e-9);
    if (std::abs(r.a_dot_coh) > floor) REQUIRE(r.tau_info_coh >= 1.0 - 1e-9);
    if (std::abs(r.a_dot_inc) > floor) REQUIRE(r.tau_info_inc >= 1.0 - 1e-9);
  }
}

TEST_CASE("vanishing rates give infinite timescales") {
  const TrajectoryPoint p = point_under(DensityMatrix::bloch(0.6, 0, 0), dephasing(0.3));
  const SpeedReport r = report(p, pauli::z());
  CHECK(std::isinf(r.tau_a));
  CHECK(std::isinf(r.tau_coh));
  CHECK(std::isinf(r.tau_inc));
}

TEST_CASE("saturating observables built from the speed operators") {
  Rng rng(29);
  for (int n = 0; n < 1000; ++n) {
    const Index d = 2 + n % 7;
    Instance in = random_instance(d, rng);
    const double scale = 1e-8 * std::max(1.0, in.ops.F);

    const SpeedReport full = report(in.point, in.ops.L_coh + in.ops.L_inc);
    CHECK(std::abs(std::abs(full.a_dot) - full.bound_cr) <= scale);

    const SpeedReport lower = report(in.point, in.ops.L_coh - in.ops.L_inc);
    CHECK(std::abs(std::abs(lower.a_dot) - lower.bound_lower_raw) <= scale);
    if (in.ops.F_coh >= in.ops.F_inc) {
      CHECK(std::abs(std::abs(lower.a_dot) - (std::abs(lower.a_dot_coh) - lower.dA_inc * std::sqrt(lower.F_inc))) <=
            scale);
    }
  }
}

TEST_CASE("constant shifts of the observable change no speed and no bound") {
  Rng rng(31);
  for (int n = 0; n < 1000; ++n) {
    const Index d = 2 + n % 7;
    Instance in = random_instance(d, rng);
    const HermitianOperator a = random_hermitian(d, rng);
    const SpeedReport r0 = report(in.point, a);
    const SpeedReport r1 = report(in.point, a + HermitianOperator::identity(d) * 2.75);
    for (auto [x, y] : {std::pair{r0.a_dot, r1.a_dot}, {r0.a_dot_coh, r1.a_dot_coh}, {r0.a_dot_inc, r1.a_dot_inc},
                        {r0.bound_cr, r1.bound_cr}, {r0.bound_coh, r1.bound_coh}, {r0.bound_inc, r1.bound_inc},
                        {r0.bound_upper, r1.bound_upper}, {r0.bound_lower, r1.bound_lower}}) {
      CHECK(std::abs(x - y) <= 1e-10 * (1.0 + std::abs(x)));
    }
  }
}

TEST_CASE("entropy rate examples") {
  const TrajectoryPoint flat = make_point(0.0, DensityMatrix::maximally_mixed(2), HermitianOperator::zero(2));
  const EntropyRate e0 = entropy_rate_bound(flat, speed_operators(flat));
  CHECK(e0.dS == doctest::Approx(0.0));
  CHECK(e0.bound == doctest::Approx(0.0));
  CHECK(e0.sie_cap == 1.0);

  const double x = 0.6, kappa = 0.25;
  const TrajectoryPoint p = point_under(DensityMatrix::bloch(x, 0, 0), dephasing(kappa));
  const EntropyRate e = entropy_rate_bound(p, speed_operators(p));
  const double pp = (1 + x) / 2, pm = (1 - x) / 2;
  const double xdot = -4 * kappa * x;
  const double s_dot = -(xdot / 2) * std::log(pp) + (xdot / 2) * std::log(pm);
  const double mean = -(pp * std::log(pp) + pm * std::log(pm));
  const double ds = std::sqrt(pp * std::log(pp) * std::log(pp) + pm * std::log(pm) * std::log(pm) - mean * mean);
  const double f_inc = xdot * xdot / (1 - x * x);
  CHECK(e.S_dot == doctest::Approx(s_dot).epsilon(1e-13));
  CHECK(e.dS == doctest::Approx(ds).epsilon(1e-13));
  CHECK(std::abs(s_dot) <= ds * std::sqrt(f_inc) + 1e-12);
  CHECK(e.holds);
  CHECK(e.dS <= 1.0 + 1e-12);
}

TEST_CASE("entropy bound and spread cap on random instances") {
  Rng rng(37);
  for (int n = 0; n < 2000; ++n) {
    const Index d = 2 + n % 7;
    Instance in = random_instance(d, rng);
    const EntropyRate e = entropy_rate_bound(in.point, in.ops);
    CHECK(std::abs(e.S_dot) <= e.bound + 1e-9);
    const double cap = std::sqrt(std::pow(std::log(double(d - 1)), 2) / 4.0 + 1.0);
    CHECK(e.dS <= cap + 1e-12);
  }
}

TEST_CASE("heat flux examples") {
  const double x = 0.6, kappa = 0.2;
  const TrajectoryPoint p = point_under(DensityMatrix::bloch(x, 0, 0), dephasing(kappa));
  const HeatFlux q = heat_flux_bound(p, speed_operators(p), pauli::x());
  CHECK(q.applicable);
  CHECK(q.flux == doctest::Approx(p.pdot(0) * 1.0 + p.pdot(1) * -1.0).epsilon(1e-13));
  CHECK(q.bound_inc == doctest::Approx(std::sqrt(1 - x * x) * 4 * kappa * x / std::sqrt(1 - x * x)).epsilon(1e-12));
  CHECK(q.holds);

  Rng rng(41);
  const DensityMatrix rho = random_full_rank_state(3, rng);
  const HermitianOperator h = random_hermitian(3, rng);
  const TrajectoryPoint u = make_point(0.0, rho, unitary_drive(h.matrix(), rho.matrix()));
  CHECK(std::abs(heat_flux_bound(u, speed_operators(u), h).flux) < 1e-14);

  const TrajectoryPoint still = make_point(0.0, DensityMatrix::maximally_mixed(2), HermitianOperator::zero(2));
  const HeatFlux z = heat_flux_bound(still, speed_operators(still), pauli::z());
  CHECK(z.flux == 0.0);
  CHECK(z.bound_inc == 0.0);
}

TEST_CASE("energy variance bounds for two coupled qubits") {
  const JointHamiltonian zx{{2, 2}, HermitianOperator::zero(2), HermitianOperator::zero(2),
                            HermitianOperator::hermitized(kron(sz(), sx()))};
  Eigen::Vector2cd plus(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)), zero(1, 0);
  const DensityMatrix joint0 = DensityMatrix::pure(kron(plus, zero));
  const Trajectory traj = evolve(joint0, Generator::constant(zx.total()), 1.0, 200);
  const SpectralFrame* prev = nullptr;
  EnergyVarianceRecord r;
  for (std::size_t k = 1; k < traj.points.size(); ++k) {
    r = energy_variance_check(traj.points[k], zx, prev);
    prev = &r.reduced_frame;
    CHECK(r.coh_holds);
    CHECK(r.inc_holds);
    // this coupling sits exactly on the incoherent bound
    CHECK(r.F_inc == doctest::Approx(4.0 * r.var_h_int).epsilon(1e-6));
  }
}

TEST_CASE("energy variance edge cases") {
  Rng rng(43);
  const JointHamiltonian local{{2, 2}, random_hermitian(2, rng), random_hermitian(2, rng),
                               HermitianOperator::zero(4)};
  const DensityMatrix rs = random_pure_state(2, rng);
  const DensityMatrix joint0(HermitianOperator::hermitized(kron(rs.matrix(), random_full_rank_state(2, rng).matrix())));
  const Trajectory traj = evolve(joint0, Generator::constant(local.total()), 0.5, 50);
  const EnergyVarianceRecord first = energy_variance_check(traj.points.front(), local);
  CHECK(first.F_inc < 1e-20);
  CHECK(first.F_coh == doctest::Approx(4.0 * first.var_h_sys).epsilon(1e-9));
  const EnergyVarianceRecord later = energy_variance_check(traj.points.back(), local);
  CHECK(later.F_inc < 1e-12);
  CHECK(later.inc_holds);

  const Generator leaky = Generator::constant(local.total(), {{0.3, kron(sz(), id(2))}});
  const TrajectoryPoint open = point_under(joint0, leaky);
  CHECK_THROWS_AS(energy_variance_check(open, local), ContractError);
}

TEST_CASE("speed-operator basis of a qubit in the x-z plane") {
  const double omega = 1.0, kappa = 0.1;
  const TrajectoryPoint p =
      point_under(DensityMatrix::bloch(0.5, 0, 0.6), dephasing(kappa, pauli::y() * (omega / 2)));
  const SpeedOperators ops = speed_operators(p);
  const SpeedOperatorBasis b = speed_operator_basis(ops, p);
  REQUIRE(b.has_coh);
  REQUIRE(b.has_inc);
  REQUIRE(b.still.size() == 2);
  CHECK_FALSE(b.still_degenerate[0]);
  CHECK(b.still_degenerate[1]);
  // the moving direction orthogonal to both speed operators is sy, the degenerate one is the identity
  const Matrix& s0 = b.still[0].matrix();
  CHECK(std::abs(std::abs(real_trace(s0, sy())) - s0.norm() * std::sqrt(2.0)) < 1e-9);
  const Matrix& s1 = b.still[1].matrix();
  CHECK(dist(s1 / s1(0, 0).real(), id(2)) < 1e-9);

  for (const HermitianOperator& a : {pauli::x(), pauli::z()}) {
    CHECK(speed_operator_basis(ops, p, &a).residual_speed < 1e-8);
  }
}

TEST_CASE("speed-operator basis is covariance-orthonormal on random instances") {
  Rng rng(47);
  for (int n = 0; n < 300; ++n) {
    const Index d = 2 + n % 7;
    Instance in = random_instance(d, rng);
    const HermitianOperator a = random_hermitian(d, rng);
    const SpeedOperatorBasis b = speed_operator_basis(in.ops, in.point, &a);
    std::vector<HermitianOperator> members{in.ops.L_coh * (1 / std::sqrt(in.ops.F_coh)),
                                           in.ops.L_inc * (1 / std::sqrt(in.ops.F_inc))};
    for (const HermitianOperator& s : b.still) members.push_back(s);
    CHECK(members.size() == std::size_t(d * d));
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        REQUIRE(std::abs(sym_covariance(in.rho, members[i], members[j])) <= 1e-9);
      }
    }
    CHECK(b.residual_speed <= 1e-8 * (1.0 + std::abs(real_trace(a.matrix(), in.point.drho.matrix()))));
  }
}

TEST_CASE("observables along the speed operators") {
  Rng rng(53);
  Instance in = random_instance(4, rng);
  const SpeedOperators& ops = in.ops;

  SUBCASE("proportional to the coherent speed operator") {
    const double c = -1.7;
    const HermitianOperator a = ops.L_coh * c;
    const SpeedOperatorBasis b = speed_operator_basis(ops, in.point, &a);
    CHECK(b.alpha_coh == doctest::Approx(c).epsilon(1e-10));
    CHECK(std::abs(b.alpha_inc) < 1e-10);
    const SpeedReport r = report(in.point, a);
    CHECK(r.a_dot == doctest::Approx(c * ops.F_coh).epsilon(1e-10));
    CHECK(std::abs(r.a_dot_coh) == doctest::Approx(r.bound_coh).epsilon(1e-10));
  }
  SUBCASE("same-sign combination saturates the split limit but not Cramer-Rao") {
    const HermitianOperator a = ops.L_coh + ops.L_inc * 2.0;
    const SpeedReport r = report(in.point, a);
    CHECK(std::abs(r.a_dot) == doctest::Approx(r.bound_upper).epsilon(1e-10));
    CHECK(std::abs(r.a_dot) == doctest::Approx(r.bound_upper_loose).epsilon(1e-10));
    CHECK(r.bound_cr > std::abs(r.a_dot) * (1 + 1e-6));
  }
  SUBCASE("opposite-sign combination saturates the lower limit") {
    const HermitianOperator a = ops.L_coh - ops.L_inc;
    const SpeedReport r = report(in.point, a);
    CHECK(std::abs(r.a_dot) == doctest::Approx(r.bound_lower).epsilon(1e-10));
    CHECK(r.bound_upper > std::abs(r.a_dot) * (1 + 1e-6));
    CHECK(r.bound_cr > std::abs(r.a_dot) * (1 + 1e-6));
  }
}

TEST_CASE("a qubit's incoherent component always saturates") {
  // diagonal operators on a qubit frame span {I, rho}: A_inc and L_inc are proportional
  Rng rng(31);
  for (int n = 0; n < 1000; ++n) {
    const Instance in = random_instance(2, rng);
    const SpeedReport r = report(in.point, random_hermitian(2, rng));
    CHECK(std::abs(r.a_dot_inc) == doctest::Approx(r.bound_inc).epsilon(1e-9).scale(1.0));
    CHECK(r.bound_upper == doctest::Approx(std::abs(r.a_dot_coh) + std::abs(r.a_dot_inc)).epsilon(1e-9).scale(1.0));
    if (r.a_dot_coh * r.a_dot_inc > 0.0) CHECK(r.bound_upper - std::abs(r.a_dot) < 1e-9 * (1.0 + r.bound_upper));
  }
}
