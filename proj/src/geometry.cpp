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

#include "qsl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace qsl {

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  const RealVector r = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * r.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

double root_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw ContractError("fidelity between states of different dimension");
  const Matrix prod = psd_sqrt(a.matrix()) * psd_sqrt(b.matrix());
  Eigen::JacobiSVD<Matrix> svd(prod);
  return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t n = 1; n < t.size(); ++n) s += 0.5 * (t[n] - t[n - 1]) * (y[n] + y[n - 1]);
  return s;
}

std::size_t rank_of(const SpectralFrame& f) {
  std::size_t r = 0;
  for (Index j = 0; j < f.dim(); ++j) r += f.supported(j) ? 1 : 0;
  return r;
}

// Squared Bures distance between a full-rank state (given by its frame) and a
// nearby state, without the cancellation in 2(1 - sqrt F). With
// sqrt(sqrt(rho) sigma sqrt(rho)) = rho + X, X solves rho X + X rho + X^2 = B
// for B = sqrt(rho) (sigma - rho) sqrt(rho), and equal traces leave
// D^2 = -2 Tr X = sum_j (X^2)_jj / p_j. Empty when the iteration does not
// contract (states too far apart or rho too close to singular).
std::optional<double> close_bures_squared(const SpectralFrame& frame, const DensityMatrix& sigma) {
  const RealVector& p = frame.probabilities;
  const Index d = frame.dim();
  const double p_min = p.minCoeff();
  if (!(p_min > 0.0)) return std::nullopt;
  const RealVector sp = p.cwiseSqrt();
  const Matrix delta = frame.to_frame(sigma.matrix()) - Matrix(p.cast<Complex>().asDiagonal());
  Matrix b(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < d; ++k) b(j, k) = sp(j) * delta(j, k) * sp(k);
  }
  auto solve = [&](const Matrix& rhs) {
    Matrix x(d, d);
    for (Index j = 0; j < d; ++j) {
      for (Index k = 0; k < d; ++k) x(j, k) = rhs(j, k) / (p(j) + p(k));
    }
    return x;
  };
  Matrix x = solve(b);
  if (max_abs(x) > 0.1 * p_min) return std::nullopt;
  for (int it = 0; it < 200; ++it) {
    const Matrix next = solve(b - x * x);
    const double change = max_abs(next - x);
    x = next;
    if (change <= 1e-17 * std::max(max_abs(x), 1e-300)) break;
  }
  const Matrix x2 = x * x;
  double d2 = 0.0;
  for (Index j = 0; j < d; ++j) d2 += x2(j, j).real() / p(j);
  return d2;
}

}  // namespace

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  const double r = root_fidelity(rho1, rho2);
  return r * r;
}

double bures_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  return std::sqrt(2.0) * std::sqrt(std::max(0.0, 1.0 - root_fidelity(rho1, rho2)));
}

double bures_angle(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  return std::acos(root_fidelity(rho1, rho2));
}

MetricConsistency metric_consistency(const Trajectory& traj, const std::vector<int>& strides) {
  MetricConsistency out;
  const auto& pts = traj.points;
  std::vector<double> fisher;
  std::vector<std::size_t> rank;
  fisher.reserve(pts.size());
  for (const auto& p : pts) {
    fisher.push_back(speed_operators(p).F);
    rank.push_back(rank_of(p.frame));
  }

  bool all_zero = true;
  for (int s : strides) {
    if (s <= 0 || static_cast<std::size_t>(s) >= pts.size()) continue;
    const double h = pts[static_cast<std::size_t>(s)].t - pts[0].t;
    double worst = 0.0;
    double mean = 0.0;
    std::size_t used = 0;
    for (std::size_t n = 0; n + static_cast<std::size_t>(s) < pts.size(); n += static_cast<std::size_t>(s)) {
      const std::size_t m = n + static_cast<std::size_t>(s);
      if (rank[n] != rank[m]) {
        ++out.skipped;
        continue;
      }
      const std::optional<double> close = close_bures_squared(pts[n].frame, pts[m].rho);
      double db2 = 0.0;
      if (close) {
        db2 = *close;
      } else {
        const double db = bures_distance(pts[n].rho, pts[m].rho);
        db2 = db * db;
      }
      const double element = db2 / (h * h);
      if (db2 > 0.0) all_zero = false;
      worst = std::max(worst, std::abs(element - 0.125 * (fisher[n] + fisher[m])));
      mean += element;
      ++used;
    }
    out.spacing.push_back(h);
    out.error.push_back(worst);
    out.line_element.push_back(used ? mean / static_cast<double>(used) : 0.0);
  }
  out.stationary = all_zero;

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < out.spacing.size(); ++i) {
    if (out.error[i] > 0.0) {
      lx.push_back(std::log(out.spacing[i]));
      ly.push_back(std::log(out.error[i]));
    }
  }
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    out.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    out.order = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

IntegratedReport integrated_report(const Trajectory& traj, const HermitianOperator& a, double slack) {
  const auto& pts = traj.points;
  if (pts.size() < 3) throw ContractError("integrated report needs at least 3 grid points");
  if (a.dim() != traj.dim()) throw ContractError("observable and trajectory dimensions differ");

  const std::size_t n = pts.size();
  std::vector<double> t(n), root_f(n), f(n), f_coh(n), f_inc(n), speed_ratio(n, 0.0), a_dot(n),
      a_dot_coh(n), a_dot_inc(n), spread_f(n), spread2(n), coh_f(n), coh2(n), inc_f(n), inc2(n),
      corr(n);
  IntegratedReport r;
  for (std::size_t k = 0; k < n; ++k) {
    const TrajectoryPoint& p = pts[k];
    const SpeedOperators ops = speed_operators(p);
    const ObservableSplit s = split_observable(a, p.frame);
    const ObservableSpeeds v = observable_speeds(s, p, ops);
    t[k] = p.t;
    f[k] = ops.F;
    f_coh[k] = ops.F_coh;
    f_inc[k] = ops.F_inc;
    root_f[k] = std::sqrt(std::max(0.0, ops.F));
    a_dot[k] = v.a_dot;
    a_dot_coh[k] = v.a_dot_coh;
    a_dot_inc[k] = v.a_dot_inc;
    corr[k] = support_correction(p, a);
    if (s.dA >= 1e-12) {
      speed_ratio[k] = std::abs(v.a_dot) / s.dA;
    } else {
      ++r.flat_instants;
    }
    spread_f[k] = s.dA * root_f[k];
    spread2[k] = s.dA * s.dA;
    coh_f[k] = s.dA_coh * std::sqrt(std::max(0.0, ops.F_coh));
    coh2[k] = s.dA_coh * s.dA_coh;
    inc_f[k] = s.dA_inc * std::sqrt(std::max(0.0, ops.F_inc));
    inc2[k] = s.dA_inc * s.dA_inc;

    const double tol = slack * (1.0 + spread_f[k]) + corr[k];
    if (std::abs(v.a_dot) > spread_f[k] + tol) {
      throw BoundViolationError("observable speed exceeds dA sqrt(F)", p.t);
    }
    if (std::abs(v.a_dot_coh) > coh_f[k] + slack * (1.0 + coh_f[k])) {
      throw BoundViolationError("coherent speed exceeds its bound", p.t);
    }
    if (std::abs(v.a_dot_inc) > inc_f[k] + tol) {
      throw BoundViolationError("incoherent speed exceeds its bound", p.t);
    }
  }

  const double tau = traj.horizon();
  r.horizon = tau;
  r.path_length = 0.5 * trapezoid(t, root_f);
  r.geodesic_length = bures_angle(pts.front().rho, pts.back().rho);
  r.divergence = tau * trapezoid(t, f);
  r.divergence_coh = tau * trapezoid(t, f_coh);
  r.divergence_inc = tau * trapezoid(t, f_inc);
  r.speed_over_spread = trapezoid(t, speed_ratio);
  r.total_change = trapezoid(t, a_dot);
  r.total_change_coh = trapezoid(t, a_dot_coh);
  r.total_change_inc = trapezoid(t, a_dot_inc);
  r.change_bound = trapezoid(t, spread_f);
  r.change_bound_coh = trapezoid(t, coh_f);
  r.change_bound_inc = trapezoid(t, inc_f);
  const auto loose = [tau](double j, double integral_sq) {
    return tau > 0.0 ? 2.0 * std::sqrt(std::max(0.0, j * integral_sq / tau)) : 0.0;
  };
  r.change_bound_divergence = loose(r.divergence, trapezoid(t, spread2));
  r.change_bound_coh_divergence = loose(r.divergence_coh, trapezoid(t, coh2));
  r.change_bound_inc_divergence = loose(r.divergence_inc, trapezoid(t, inc2));
  r.support_correction = trapezoid(t, corr);

  const double end = pts.back().t;
  const auto check = [&](bool ok, const char* what) {
    if (!ok) throw BoundViolationError(what, end);
  };
  const auto le = [&](double lhs, double rhs, double extra = 0.0) {
    return lhs <= rhs + slack * (1.0 + std::abs(rhs)) + extra;
  };
  const double sc = r.support_correction;
  check(le(r.speed_over_spread, 2.0 * r.path_length, sc), "normalized speed integral exceeds twice the path length");
  check(le(r.geodesic_length, r.path_length), "geodesic length exceeds the path length");
  check(le(r.path_length * r.path_length, r.divergence), "squared path length exceeds the divergence");
  check(le(std::abs(r.total_change), r.change_bound, sc), "total change exceeds the length bound");
  check(le(r.change_bound, r.change_bound_divergence), "length bound exceeds its divergence form");
  check(le(std::abs(r.total_change_inc), r.change_bound_inc, sc), "incoherent change exceeds its bound");
  check(le(r.change_bound_inc, r.change_bound_inc_divergence), "incoherent bound exceeds its divergence form");
  check(le(std::abs(r.total_change_coh), r.change_bound_coh), "coherent change exceeds its bound");
  check(le(r.change_bound_coh, r.change_bound_coh_divergence), "coherent bound exceeds its divergence form");
  return r;
}

FidelitySpeedRecord fidelity_speed_check(const Trajectory& traj, double slack) {
  const auto& pts = traj.points;
  if (pts.size() < 2) throw ContractError("fidelity check needs at least 2 grid points");
  const SpectralFrame f0 = spectral_decompose(pts.front().rho);
  if (f0.probabilities(0) <= 1.0 - 1e-9) throw ContractError("initial state is not pure");
  const HermitianOperator proj = HermitianOperator::hermitized(
      f0.basis.col(0) * f0.basis.col(0).adjoint());

  FidelitySpeedRecord rec;
  std::vector<double> t, mid, upper;
  for (const TrajectoryPoint& p : pts) {
    const SpeedOperators ops = speed_operators(p);
    const ObservableSplit s = split_observable(proj, p.frame);
    const double surv = std::clamp(p.rho.expectation(proj), 0.0, 1.0);
    const double rate = (p.drho.matrix().transpose().cwiseProduct(proj.matrix())).sum().real();
    const double sc = std::sqrt(std::max(0.0, ops.F_coh));
    const double si = std::sqrt(std::max(0.0, ops.F_inc));
    const double sf = std::sqrt(std::max(0.0, ops.F));
    const double split_bound = s.dA_coh * sc + s.dA_inc * si;
    const double loose = s.dA * sf;
    rec.max_pointwise_excess = std::max(rec.max_pointwise_excess, std::abs(rate) - split_bound);
    rec.max_intermediate_excess = std::max(rec.max_intermediate_excess, split_bound - loose);
    if (std::abs(rate) > split_bound + slack * (1.0 + split_bound) ||
        split_bound > loose + slack * (1.0 + loose)) {
      rec.holds = false;
    }

    const double spread = std::sqrt(std::max(0.0, surv - surv * surv));
    const double up = 0.5 * sf;
    const double m = spread * spread < 1e-14 ? up : split_bound / (2.0 * spread);
    if (ops.F_inc > 0.0 && m < up - slack) ++rec.strictly_tighter;
    t.push_back(p.t);
    mid.push_back(m);
    upper.push_back(up);
    rec.survival.push_back(surv);
  }
  rec.integral_intermediate = trapezoid(t, mid);
  rec.integral_upper = trapezoid(t, upper);
  rec.angle_end = std::acos(std::sqrt(rec.survival.back()));
  if (rec.angle_end > rec.integral_intermediate + 1e-7 * (1.0 + rec.integral_intermediate) ||
      rec.integral_intermediate > rec.integral_upper + 1e-7 * (1.0 + rec.integral_upper)) {
    rec.holds = false;
  }
  return rec;
}

}  // namespace qsl
