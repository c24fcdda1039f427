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

#include "qsl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

double frame_mean(const SpectralFrame& f, const Matrix& xf) {
  double mean = 0.0;
  for (Index j = 0; j < f.dim(); ++j) mean += f.probabilities(j) * xf(j, j).real();
  return mean;
}

double timescale(double spread, double rate, double zero_rate) {
  return std::abs(rate) < zero_rate ? kInf : spread / std::abs(rate);
}

}  // namespace

ObservableSplit split_observable(const HermitianOperator& a, const SpectralFrame& frame) {
  if (a.dim() != frame.dim()) throw ContractError("observable and frame dimensions differ");
  const Matrix af = frame.to_frame(a.matrix());
  const Matrix diag = af.diagonal().real().cast<Complex>().asDiagonal();

  ObservableSplit s;
  s.A = a;
  s.A_inc = HermitianOperator::hermitized(frame.from_frame(diag));
  s.A_coh = HermitianOperator::hermitized(a.matrix() - s.A_inc.matrix());

  const double mean = frame_mean(frame, af);
  double var_coh = 0.0;
  double var_inc = 0.0;
  for (Index j = 0; j < frame.dim(); ++j) {
    const double p = std::max(0.0, frame.probabilities(j));
    const double dev = af(j, j).real() - mean;
    var_inc += p * dev * dev;
    for (Index k = 0; k < frame.dim(); ++k) {
      if (k != j) var_coh += p * std::norm(af(j, k));
    }
  }
  s.dA_coh = std::sqrt(var_coh);
  s.dA_inc = std::sqrt(var_inc);
  s.dA = std::sqrt(var_coh + var_inc);
  return s;
}

ObservableSpeeds observable_speeds(const ObservableSplit& split, const TrajectoryPoint& point,
                                   const SpeedOperators& ops) {
  const Matrix& drho = point.drho.matrix();
  ObservableSpeeds v;
  v.a_dot = trace_product(split.A.matrix(), drho);
  v.a_dot_coh = trace_product(split.A_coh.matrix(), drho);
  v.a_dot_inc = trace_product(split.A_inc.matrix(), drho);

  const SpectralFrame& f = point.frame;
  const Matrix af = f.to_frame(split.A.matrix());
  const Matrix df = f.to_frame(drho);
  const double mean = frame_mean(f, af);
  double unsupported_coh = 0.0;
  double unsupported_inc = 0.0;
  for (Index j = 0; j < f.dim(); ++j) {
    if (!f.supported(j)) unsupported_inc += point.pdot(j) * (af(j, j).real() - mean);
    for (Index k = 0; k < f.dim(); ++k) {
      if (j != k && f.probabilities(j) + f.probabilities(k) <= f.rank_tol) {
        unsupported_coh += (af(j, k) * df(k, j)).real();
      }
    }
  }
  v.cov_coh = sym_covariance(point.rho, split.A_coh, ops.L_coh) + unsupported_coh;
  v.cov_inc = sym_covariance(point.rho, split.A_inc, ops.L_inc) + unsupported_inc;

  const double scale = std::max(1.0, split.dA_coh * std::sqrt(ops.F_coh) +
                                         split.dA_inc * std::sqrt(ops.F_inc) + std::abs(v.a_dot));
  const double gap = std::max(std::abs(v.a_dot_coh - v.cov_coh), std::abs(v.a_dot_inc - v.cov_inc));
  if (gap > 1e-6 * scale) {
    throw ConsistencyError("trace and covariance speeds disagree by " + std::to_string(gap) +
                           " at t = " + std::to_string(point.t));
  }
  return v;
}

double tightness_ratio_closed_form(double dA_coh, double dA_inc, double F_coh, double F_inc) {
  const double sc = std::sqrt(F_coh);
  const double si = std::sqrt(F_inc);
  const double den = dA_coh * sc + dA_inc * si;
  const double num = dA_coh * si - dA_inc * sc;
  if (den == 0.0) return num == 0.0 ? 1.0 : kInf;
  return std::sqrt(1.0 + (num / den) * (num / den));
}

SpeedReport speed_report(const ObservableSplit& split, const TrajectoryPoint& point,
                         const SpeedOperators& ops, double support_corr, const ToleranceSet& tol) {
  const ObservableSpeeds v = observable_speeds(split, point, ops);
  SpeedReport r;
  r.a_dot = v.a_dot;
  r.a_dot_coh = v.a_dot_coh;
  r.a_dot_inc = v.a_dot_inc;
  r.dA = split.dA;
  r.dA_coh = split.dA_coh;
  r.dA_inc = split.dA_inc;
  r.F = ops.F;
  r.F_coh = ops.F_coh;
  r.F_inc = ops.F_inc;

  const double sf = std::sqrt(std::max(0.0, ops.F));
  const double sc = std::sqrt(std::max(0.0, ops.F_coh));
  const double si = std::sqrt(std::max(0.0, ops.F_inc));
  r.bound_cr = split.dA * sf;
  r.bound_coh = split.dA_coh * sc;
  r.bound_inc = split.dA_inc * si;
  r.bound_upper = std::min(std::abs(v.a_dot_coh) + r.bound_inc, std::abs(v.a_dot_inc) + r.bound_coh);
  r.bound_upper_loose = r.bound_coh + r.bound_inc;
  r.bound_lower_raw =
      std::max(std::abs(v.a_dot_coh) - r.bound_inc, std::abs(v.a_dot_inc) - r.bound_coh);
  r.bound_lower = std::max(0.0, r.bound_lower_raw);

  if (r.bound_upper_loose > 0.0) {
    r.ratio = r.bound_cr / r.bound_upper_loose;
  } else {
    r.ratio = r.bound_cr > 0.0 ? kInf : 1.0;
  }

  r.tau_a = timescale(split.dA, v.a_dot, tol.zero_rate);
  r.tau_coh = timescale(split.dA_coh, v.a_dot_coh, tol.zero_rate);
  r.tau_inc = timescale(split.dA_inc, v.a_dot_inc, tol.zero_rate);
  r.tau_info = std::isinf(r.tau_a) ? kInf : r.tau_a * sf;
  r.tau_info_coh = std::isinf(r.tau_coh) ? kInf : r.tau_coh * sc;
  r.tau_info_inc = std::isinf(r.tau_inc) ? kInf : r.tau_inc * si;
  r.support_corr = support_corr;
  return r;
}

EntropyRate entropy_rate_bound(const TrajectoryPoint& point, const SpeedOperators& ops) {
  const SpectralFrame& f = point.frame;
  EntropyRate e;
  for (Index j = 0; j < f.dim(); ++j) {
    if (!f.supported(j)) {
      if (point.pdot(j) > 1e-9) e.support_flag = true;
      continue;
    }
    const double p = f.probabilities(j);
    const double lp = std::log(p);
    e.S -= p * lp;
    e.S_dot -= point.pdot(j) * lp;
  }
  double var = 0.0;
  for (Index j = 0; j < f.dim(); ++j) {
    if (!f.supported(j)) continue;
    const double p = f.probabilities(j);
    const double s = -std::log(p) - e.S;
    var += p * s * s;
  }
  e.dS = std::sqrt(var);
  e.bound = e.dS * std::sqrt(std::max(0.0, ops.F_inc));
  const double d = static_cast<double>(f.dim());
  const double lnd = d > 2.0 ? std::log(d - 1.0) : 0.0;
  e.sie_cap = std::sqrt(lnd * lnd / 4.0 + 1.0);
  e.holds = std::abs(e.S_dot) <= e.bound + 1e-9;
  e.cap_holds = e.dS <= e.sie_cap + 1e-12;
  return e;
}

HeatFlux heat_flux_bound(const TrajectoryPoint& point, const SpeedOperators& ops,
                         const HermitianOperator& h) {
  if (h.dim() != point.rho.dim()) throw ContractError("Hamiltonian and state dimensions differ");
  const ObservableSplit s = split_observable(h, point.frame);
  HeatFlux q;
  q.flux = trace_product(h.matrix(), point.drho.matrix());
  q.flux_coh = trace_product(h.matrix(), point.coh.matrix());
  const double sc = std::sqrt(std::max(0.0, ops.F_coh));
  const double si = std::sqrt(std::max(0.0, ops.F_inc));
  q.bound_inc = s.dA_inc * si;
  q.bound_printed = s.dA_inc * sc;
  q.bound_coh = s.dA_coh * sc;
  q.applicable = std::abs(q.flux_coh) <= 1e-10 * (1.0 + std::abs(q.flux));
  q.holds = !q.applicable || std::abs(q.flux) <= q.bound_inc + 1e-9 * (1.0 + q.bound_inc);
  return q;
}

HermitianOperator JointHamiltonian::total() const {
  const Matrix is = Matrix::Identity(dims.d_s, dims.d_s);
  const Matrix ie = Matrix::Identity(dims.d_e, dims.d_e);
  return HermitianOperator::hermitized(kron(h_sys.matrix(), ie) + kron(is, h_env.matrix()) +
                                       h_int.matrix());
}

EnergyVarianceRecord energy_variance_check(const TrajectoryPoint& joint, const JointHamiltonian& h,
                                           const SpectralFrame* prev_reduced, double slack,
                                           const ToleranceSet& tol) {
  const Index dj = h.dims.d_s * h.dims.d_e;
  if (joint.rho.dim() != dj || h.h_sys.dim() != h.dims.d_s || h.h_env.dim() != h.dims.d_e ||
      h.h_int.dim() != dj) {
    throw ContractError("joint Hamiltonian does not match the factorization");
  }
  const Matrix ht = h.total().matrix();
  const Matrix& rho = joint.rho.matrix();
  const Matrix unitary = -kI * (ht * rho - rho * ht);
  const double mismatch = max_abs(unitary - joint.drho.matrix());
  if (mismatch > 1e-8 * (1.0 + max_abs(joint.drho.matrix()))) {
    throw ContractError("joint derivative is not generated by the joint Hamiltonian (mismatch " +
                        std::to_string(mismatch) + ")");
  }

  const DensityMatrix rho_s = partial_trace(joint.rho, h.dims, Subsystem::System, tol);
  const HermitianOperator drho_s = HermitianOperator::hermitized(
      partial_trace(joint.drho.matrix(), h.dims, Subsystem::System));
  const TrajectoryPoint reduced = prev_reduced
                                      ? make_point(joint.t, rho_s, drho_s, *prev_reduced, tol)
                                      : make_point(joint.t, rho_s, drho_s, tol);
  const SpeedOperators ops = speed_operators(reduced);

  EnergyVarianceRecord r;
  r.t = joint.t;
  r.F_coh = ops.F_coh;
  r.F_inc = ops.F_inc;
  r.var_h_sys = variance(rho_s, h.h_sys);
  r.var_h_int = variance(joint.rho, h.h_int);
  r.coh_holds = r.F_coh <= 4.0 * r.var_h_sys + slack;
  r.inc_holds = r.F_inc <= 4.0 * r.var_h_int + slack;
  r.inc_strict = !(r.F_inc > 1e-9) || r.F_inc < 4.0 * r.var_h_int;
  try {
    const EffectiveHamiltonian eff = effective_hamiltonian(reduced.coh, reduced.frame, tol.gap,
                                                           tol.drive);
    r.var_h_eff = variance(rho_s, eff.h);
    r.eff_holds = r.F_coh <= 4.0 * *r.var_h_eff + slack;
  } catch (const DegenerateDriveError&) {
    r.var_h_eff.reset();
  }
  r.reduced_frame = reduced.frame;
  return r;
}

namespace {

// Real coordinates of X in which the Euclidean inner product is the
// symmetrized covariance under the frame's probabilities.
Eigen::VectorXd covariance_coords(const SpectralFrame& f, const Matrix& x) {
  const Index d = f.dim();
  Matrix xf = f.to_frame(x);
  const double mean = frame_mean(f, xf);
  xf.diagonal().array() -= mean;
  Eigen::VectorXd w(2 * d * d);
  Index n = 0;
  for (Index j = 0; j < d; ++j) {
    const double sp = std::sqrt(std::max(0.0, f.probabilities(j)));
    for (Index k = 0; k < d; ++k) {
      w(n++) = sp * xf(j, k).real();
      w(n++) = sp * xf(j, k).imag();
    }
  }
  return w;
}

std::vector<Matrix> hermitian_basis(Index d) {
  std::vector<Matrix> out;
  const double r = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < d; ++j) {
    Matrix e = Matrix::Zero(d, d);
    e(j, j) = 1.0;
    out.push_back(e);
  }
  for (Index j = 0; j < d; ++j) {
    for (Index k = j + 1; k < d; ++k) {
      Matrix s = Matrix::Zero(d, d);
      s(j, k) = r;
      s(k, j) = r;
      out.push_back(s);
      Matrix a = Matrix::Zero(d, d);
      a(j, k) = Complex(0, -r);
      a(k, j) = Complex(0, r);
      out.push_back(a);
    }
  }
  return out;
}

double frobenius_dot(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace().real(); }

}  // namespace

SpeedOperatorBasis speed_operator_basis(const SpeedOperators& ops, const TrajectoryPoint& point,
                                        const HermitianOperator* a) {
  const SpectralFrame& f = point.frame;
  const Index d = f.dim();
  SpeedOperatorBasis b;
  b.L_coh = ops.L_coh;
  b.L_inc = ops.L_inc;
  b.has_coh = ops.F_coh > 1e-12;
  b.has_inc = ops.F_inc > 1e-12;

  std::vector<Eigen::VectorXd> accepted;
  auto seed = [&](const HermitianOperator& l, double fisher) {
    accepted.push_back(covariance_coords(f, l.matrix()) / std::sqrt(fisher));
  };
  if (b.has_coh) seed(ops.L_coh, ops.F_coh);
  if (b.has_inc) seed(ops.L_inc, ops.F_inc);

  struct Candidate {
    Matrix m;
    Eigen::VectorXd w;
  };
  std::vector<Candidate> pool;
  for (Matrix& m : hermitian_basis(d)) {
    Candidate c{m, covariance_coords(f, m)};
    pool.push_back(std::move(c));
  }
  // The seeds' matrices, kept alongside their coordinates so residuals stay operators.
  std::vector<Matrix> accepted_m;
  if (b.has_coh) accepted_m.push_back(ops.L_coh.matrix() / std::sqrt(ops.F_coh));
  if (b.has_inc) accepted_m.push_back(ops.L_inc.matrix() / std::sqrt(ops.F_inc));
  for (Candidate& c : pool) {
    for (std::size_t q = 0; q < accepted.size(); ++q) {
      const double proj = accepted[q].dot(c.w);
      c.w -= proj * accepted[q];
      c.m -= proj * accepted_m[q];
    }
  }

  while (!pool.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (pool[i].w.norm() > pool[best].w.norm()) best = i;
    }
    const double norm = pool[best].w.norm();
    if (norm < 1e-10) break;
    Candidate pick = std::move(pool[best]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    pick.w /= norm;
    pick.m /= norm;
    for (Candidate& c : pool) {
      const double proj = pick.w.dot(c.w);
      c.w -= proj * pick.w;
      c.m -= proj * pick.m;
    }
    b.still.push_back(HermitianOperator::hermitized(pick.m));
    b.still_degenerate.push_back(false);
    accepted.push_back(pick.w);
    accepted_m.push_back(pick.m);
  }

  // What is left spans directions the state cannot distinguish; orthonormalize
  // them in the Frobenius inner product.
  const std::size_t missing = static_cast<std::size_t>(d * d) - accepted.size();
  std::vector<Matrix> still_deg;
  while (still_deg.size() < missing && !pool.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (pool[i].m.norm() > pool[best].m.norm()) best = i;
    }
    const double norm = pool[best].m.norm();
    if (norm < 1e-8) break;
    Matrix pick = pool[best].m / norm;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    for (Candidate& c : pool) c.m -= frobenius_dot(pick, c.m) * pick;
    still_deg.push_back(pick);
  }
  for (const Matrix& m : still_deg) {
    b.still.push_back(HermitianOperator::hermitized(m));
    b.still_degenerate.push_back(true);
  }

  if (a) {
    if (a->dim() != d) throw ContractError("observable and frame dimensions differ");
    b.alpha_coh = b.has_coh ? sym_covariance(point.rho, *a, ops.L_coh) / ops.F_coh : 0.0;
    b.alpha_inc = b.has_inc ? sym_covariance(point.rho, *a, ops.L_inc) / ops.F_inc : 0.0;
    const double a_dot = trace_product(a->matrix(), point.drho.matrix());
    b.residual_speed = std::abs(a_dot - b.alpha_coh * ops.F_coh - b.alpha_inc * ops.F_inc);
  }
  return b;
}

}  // namespace qsl
