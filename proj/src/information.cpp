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

#include "qsl/information.hpp"

#include <cmath>
#include <string>

namespace qsl {

namespace {

// Variance of X under the frame's probabilities; x is given in frame coordinates.
double frame_variance(const SpectralFrame& f, const Matrix& x) {
  const Index d = f.dim();
  double mean = 0.0;
  for (Index j = 0; j < d; ++j) mean += f.probabilities(j) * x(j, j).real();
  double var = 0.0;
  for (Index j = 0; j < d; ++j) {
    const double pj = f.probabilities(j);
    if (pj <= 0.0) continue;
    for (Index k = 0; k < d; ++k) {
      const Complex v = (j == k) ? x(j, k) - mean : x(j, k);
      var += pj * std::norm(v);
    }
  }
  return var;
}

Matrix sld_frame(const SpectralFrame& f, const Matrix& d, double* unsupported) {
  const Index n = f.dim();
  Matrix l = Matrix::Zero(n, n);
  double lost = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      const double s = f.probabilities(j) + f.probabilities(k);
      const bool keep = (j == k) ? f.supported(j) : s > f.rank_tol;
      if (keep) {
        l(j, k) = 2.0 * d(j, k) / s;
      } else {
        lost = std::max(lost, std::abs(d(j, k)));
      }
    }
  }
  if (unsupported) *unsupported = lost;
  return l;
}

}  // namespace

HermitianOperator sld(const TrajectoryPoint& point) {
  const SpectralFrame& f = point.frame;
  const Matrix l = sld_frame(f, f.to_frame(point.drho.matrix()), nullptr);
  return HermitianOperator::hermitized(f.from_frame(l));
}

SpeedOperators speed_operators(const TrajectoryPoint& point) {
  const SpectralFrame& f = point.frame;
  const Index n = f.dim();
  SpeedOperators ops;

  const Matrix lf = sld_frame(f, f.to_frame(point.drho.matrix()), &ops.unsupported_drive);

  Matrix coh = f.to_frame(point.coh.matrix());
  coh.diagonal().setZero();
  Matrix lc = sld_frame(f, coh, nullptr);
  lc.diagonal().setZero();

  Matrix li = Matrix::Zero(n, n);
  double f_inc = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double pj = f.probabilities(j);
    const double rate = point.pdot(j);
    if (f.supported(j)) {
      li(j, j) = rate / pj;
      f_inc += rate * rate / pj;
    } else if (std::abs(rate) > 1e-9) {
      ops.support_violation = true;
    }
  }

  ops.L = HermitianOperator::hermitized(f.from_frame(lf));
  ops.L_coh = HermitianOperator::hermitized(f.from_frame(lc));
  ops.L_inc = HermitianOperator::hermitized(f.from_frame(li));
  ops.F = frame_variance(f, lf);
  ops.F_coh = frame_variance(f, lc);
  ops.F_inc = f_inc;
  return ops;
}

double support_correction(const TrajectoryPoint& point, const HermitianOperator& a) {
  const SpectralFrame& f = point.frame;
  if (a.dim() != f.dim()) throw ContractError("observable and frame dimensions differ");
  const Matrix af = f.to_frame(a.matrix());
  double mean = 0.0;
  for (Index j = 0; j < f.dim(); ++j) mean += f.probabilities(j) * af(j, j).real();
  double sum = 0.0;
  for (Index j = 0; j < f.dim(); ++j) {
    if (!f.supported(j)) sum += point.pdot(j) * (af(j, j).real() - mean);
  }
  return std::abs(sum);
}

double classical_fisher_povm(const TrajectoryPoint& point, const std::vector<HermitianOperator>& povm,
                             const ToleranceSet& tol) {
  const Index d = point.rho.dim();
  if (povm.empty()) throw ContractError("empty POVM");
  Matrix total = Matrix::Zero(d, d);
  for (const auto& e : povm) {
    if (e.dim() != d) throw ContractError("POVM element has the wrong dimension");
    Eigen::SelfAdjointEigenSolver<Matrix> es(e.matrix(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.povm) throw ContractError("POVM element is not PSD");
    total += e.matrix();
  }
  if (max_abs(total - Matrix::Identity(d, d)) > tol.povm) {
    throw ContractError("POVM elements do not sum to the identity");
  }
  double fisher = 0.0;
  for (std::size_t a = 0; a < povm.size(); ++a) {
    const double q = point.rho.expectation(povm[a]);
    const double qdot = (point.drho.matrix().transpose().cwiseProduct(povm[a].matrix())).sum().real();
    if (q < tol.rank) {
      if (std::abs(qdot) < 1e-9) continue;
      throw SingularOutcomeError("outcome " + std::to_string(a) +
                                 " has vanishing probability but nonzero rate");
    }
    fisher += qdot * qdot / q;
  }
  return fisher;
}

}  // namespace qsl
