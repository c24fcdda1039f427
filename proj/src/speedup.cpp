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

#include "qsl/speedup.hpp"

#include <cmath>
#include <string>

namespace qsl {

SpeedupPolicy SpeedupPolicy::with_lambda(const HermitianOperator& a, double lambda, int direction) {
  SpeedupPolicy p;
  p.observable = a;
  p.lambda = lambda;
  p.direction = direction;
  return p;
}

SpeedupPolicy SpeedupPolicy::with_norm_cap(const HermitianOperator& a, double epsilon, int direction) {
  SpeedupPolicy p;
  p.observable = a;
  p.norm_cap = epsilon;
  p.direction = direction;
  return p;
}

SpeedupHamiltonian synthesize_speedup(const SpectralFrame& frame, const SpeedupPolicy& policy,
                                      const ToleranceSet& tol) {
  if (policy.lambda.has_value() == policy.norm_cap.has_value()) {
    throw ContractError("speedup policy needs exactly one of lambda and norm_cap");
  }
  if (policy.norm_cap && !(*policy.norm_cap > 0.0)) throw ContractError("norm cap must be positive");
  if (policy.direction != 1 && policy.direction != -1) throw ContractError("direction must be +1 or -1");
  if (policy.observable.dim() != frame.dim()) throw ContractError("observable and frame dimensions differ");

  const Index d = frame.dim();
  const Matrix af = frame.to_frame(policy.observable.matrix());
  Matrix shape = Matrix::Zero(d, d);  // the Hamiltonian at unit lambda, in frame coordinates
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < d; ++k) {
      if (j == k || std::abs(af(j, k)) <= 1e-12) continue;
      const double pj = frame.probabilities(j);
      const double pk = frame.probabilities(k);
      const bool sj = frame.supported(j);
      const bool sk = frame.supported(k);
      double ratio = 0.0;
      if (sj && sk) {
        if (std::abs(pj - pk) < tol.gap) {
          throw UnattainableSaturationError("observable couples degenerate levels " +
                                            std::to_string(j) + " and " + std::to_string(k));
        }
        ratio = (pj + pk) / (pj - pk);
      } else if (sj != sk) {
        ratio = sj ? 1.0 : -1.0;
      }
      shape(j, k) = -static_cast<double>(policy.direction) * 0.5 * kI * ratio * af(j, k);
    }
  }
  const HermitianOperator unit = HermitianOperator::hermitized(frame.from_frame(shape));

  SpeedupHamiltonian out;
  if (policy.lambda) {
    out.lambda = *policy.lambda;
  } else {
    const double n = operator_norm(unit);
    out.lambda = n > 0.0 ? *policy.norm_cap / n : 0.0;
  }
  out.h = unit * out.lambda;
  return out;
}

HermitianOperator speedup_hamiltonian(const SpectralFrame& frame, const SpeedupPolicy& policy,
                                      const ToleranceSet& tol) {
  return synthesize_speedup(frame, policy, tol).h;
}

namespace {

struct ErasureModel {
  HermitianOperator z;
  HermitianOperator x;
  std::vector<LindbladChannel> channels;
};

ErasureModel erasure_model(double gamma) {
  ErasureModel m;
  Matrix z = Matrix::Zero(3, 3);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  Matrix x = Matrix::Zero(3, 3);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  m.z = HermitianOperator::hermitized(z);
  m.x = HermitianOperator::hermitized(x);
  for (Index level = 0; level < 2; ++level) {
    Matrix jump = Matrix::Zero(3, 3);
    jump(2, level) = 1.0;
    m.channels.push_back({gamma, jump});
  }
  return m;
}

double trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

}  // namespace

ErasureComparison erasure_scenario(double a, double b, double gamma, double epsilon, double t_max,
                                   std::size_t steps, const ToleranceSet& tol) {
  if (std::abs(a * a + b * b - 1.0) > 1e-9) throw ContractError("a^2 + b^2 must equal 1");
  if (!(gamma >= 0.0) || !(epsilon >= 0.0)) throw ContractError("rates must be nonnegative");
  if (steps < 2 || !(t_max > 0.0)) throw ContractError("need t_max > 0 and at least 2 steps");

  const ErasureModel model = erasure_model(gamma);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3);
  psi(0) = a;
  psi(1) = b;
  const DensityMatrix rho0 = DensityMatrix::pure(psi);

  const Trajectory incoherent =
      evolve(rho0, Generator::constant(HermitianOperator::zero(3), model.channels), t_max, steps, tol);

  ErasureComparison out;
  out.samples.reserve(steps + 1);
  const double dt = t_max / static_cast<double>(steps);
  const double z0 = rho0.expectation(model.z);

  DensityMatrix state = rho0;
  std::optional<SpectralFrame> prev;
  for (std::size_t n = 0; n <= steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const double z = state.expectation(model.z);
    const double x = state.expectation(model.x);

    HermitianOperator h = HermitianOperator::zero(3);
    const HermitianOperator no_drive = lindblad_derivative(
        state, Generator::constant(h, model.channels), t);
    const TrajectoryPoint point =
        prev ? make_point(t, state, no_drive, *prev, tol) : make_point(t, state, no_drive, tol);
    prev = point.frame;
    if (epsilon > 0.0 && z != 0.0) {
      const int direction = z > 0.0 ? -1 : 1;
      h = speedup_hamiltonian(point.frame, SpeedupPolicy::with_norm_cap(model.z, epsilon, direction),
                              tol);
    }
    const Generator gen = Generator::constant(h, model.channels);
    const HermitianOperator drho = lindblad_derivative(state, gen, t);

    const TrajectoryPoint& ip = incoherent.points[n];
    ErasureSample s;
    s.t = t;
    s.z_inc = ip.rho.expectation(model.z);
    s.x_inc = ip.rho.expectation(model.x);
    s.z_enh = z;
    s.x_enh = x;
    if (std::abs(s.z_inc) > 1e-6) {
      s.rate_inc = trace_product(model.z.matrix(), ip.drho.matrix()) / s.z_inc;
      const double err = std::abs(*s.rate_inc + gamma);
      out.max_rate_error_inc = std::max(out.max_rate_error_inc, err);
      if (err > 1e-6) throw BoundViolationError("incoherent erasure rate departs from -gamma", t);
    }
    if (!out.crossing_time && (std::abs(z) <= 1e-6 || z * z0 < 0.0)) out.crossing_time = t;
    if (std::abs(z) > 1e-6) {
      s.rate_enh = trace_product(model.z.matrix(), drho.matrix()) / z;
      if (!out.crossing_time) {
        const double err = std::abs(*s.rate_enh - (-gamma - 2.0 * epsilon * std::abs(x / z)));
        out.max_rate_error_enh = std::max(out.max_rate_error_enh, err);
        if (err > 1e-5) throw BoundViolationError("enhanced erasure rate departs from its closed form", t);
      }
    }
    if (std::abs(s.z_enh) > std::abs(s.z_inc) + 1e-12) out.enhanced_dominates = false;
    out.samples.push_back(s);

    if (n < steps) {
      bool projected = false;
      state = restore_state(rk4_step(state.matrix(), gen, t, dt), n + 1, tol, &projected);
    }
  }
  return out;
}

}  // namespace qsl
