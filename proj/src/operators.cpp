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

#include "qsl/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qsl {

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianOperator::HermitianOperator(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ContractError("Hermitian operator must be a non-empty square matrix");
  }
  const double err = max_abs(m - m.adjoint());
  if (!(err <= tol)) {
    throw InvalidStateError("matrix is not Hermitian: max |A - A^dagger| = " + std::to_string(err));
  }
  m_ = hermitian_part(m);
}

HermitianOperator HermitianOperator::hermitized(const Matrix& m) {
  if (m.rows() != m.cols()) throw ContractError("operator must be square");
  HermitianOperator h;
  h.m_ = hermitian_part(m);
  return h;
}

HermitianOperator HermitianOperator::zero(Index dim) { return hermitized(Matrix::Zero(dim, dim)); }

HermitianOperator HermitianOperator::identity(Index dim) {
  return hermitized(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (o.dim() != dim()) throw ContractError("dimension mismatch in operator sum");
  return hermitized(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (o.dim() != dim()) throw ContractError("dimension mismatch in operator difference");
  return hermitized(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return hermitized(m_ * s); }

DensityMatrix::DensityMatrix(const HermitianOperator& op, const ToleranceSet& tol) : op_(op) {
  if (op.dim() == 0) throw ContractError("empty density matrix");
  const double tr = op.matrix().trace().real();
  if (!(std::abs(tr - 1.0) <= tol.trace)) {
    throw InvalidStateError("density matrix trace is " + std::to_string(tr));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.matrix(), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -tol.psd) {
    throw InvalidStateError("density matrix has negative eigenvalue " + std::to_string(lo));
  }
}

DensityMatrix::DensityMatrix(const Matrix& m, const ToleranceSet& tol)
    : DensityMatrix(HermitianOperator(m, tol.hermiticity), tol) {}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw ContractError("zero state vector");
  const Eigen::VectorXcd v = psi / n;
  return DensityMatrix(HermitianOperator::hermitized(v * v.adjoint()));
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(HermitianOperator::identity(dim) * (1.0 / static_cast<double>(dim)));
}

DensityMatrix DensityMatrix::bloch(double x, double y, double z) {
  Matrix m(2, 2);
  m << Complex(1 + z, 0), Complex(x, -y), Complex(x, y), Complex(1 - z, 0);
  return DensityMatrix(HermitianOperator::hermitized(0.5 * m));
}

double DensityMatrix::expectation(const HermitianOperator& a) const {
  if (a.dim() != dim()) throw ContractError("dimension mismatch in expectation value");
  return (matrix().transpose().cwiseProduct(a.matrix())).sum().real();
}

Matrix SpectralFrame::reconstruct() const {
  return basis * probabilities.cast<Complex>().asDiagonal() * basis.adjoint();
}

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag >= top - 1e-12) {
      v *= std::conj(v(i)) / mag;
      return;
    }
  }
}

SpectralFrame spectral_decompose(const DensityMatrix& rho, const ToleranceSet& tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  if (es.info() != Eigen::Success) throw InvalidStateError("eigensolver failed");
  const RealVector& ev = es.eigenvalues();
  if (ev.minCoeff() < -tol.psd) {
    throw InvalidStateError("state has negative eigenvalue " + std::to_string(ev.minCoeff()));
  }
  const Index d = rho.dim();
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return ev(a) > ev(b); });

  SpectralFrame f;
  f.rank_tol = tol.rank;
  f.probabilities.resize(d);
  f.basis.resize(d, d);
  for (Index j = 0; j < d; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    f.probabilities(j) = ev(src);
    f.basis.col(j) = es.eigenvectors().col(src);
    fix_phase(f.basis.col(j));
  }
  return f;
}

SpectralFrame align_frame(const SpectralFrame& frame, const SpectralFrame& prev,
                          const ToleranceSet& tol) {
  const Index d = frame.dim();
  if (prev.dim() != d) throw ContractError("previous frame has a different dimension");
  const Eigen::MatrixXd overlap = (prev.basis.adjoint() * frame.basis).cwiseAbs();

  std::vector<Index> slot_of(static_cast<std::size_t>(d), -1);
  std::vector<bool> prev_used(static_cast<std::size_t>(d), false);
  std::vector<bool> now_used(static_cast<std::size_t>(d), false);
  bool lost = false;
  for (Index round = 0; round < d; ++round) {
    double best = -1.0;
    Index ba = 0, bb = 0;
    for (Index a = 0; a < d; ++a) {
      if (prev_used[static_cast<std::size_t>(a)]) continue;
      for (Index b = 0; b < d; ++b) {
        if (now_used[static_cast<std::size_t>(b)]) continue;
        if (overlap(a, b) > best) {
          best = overlap(a, b);
          ba = a;
          bb = b;
        }
      }
    }
    prev_used[static_cast<std::size_t>(ba)] = true;
    now_used[static_cast<std::size_t>(bb)] = true;
    slot_of[static_cast<std::size_t>(ba)] = bb;
    if (best < tol.continuity) lost = true;
  }

  SpectralFrame out;
  out.rank_tol = frame.rank_tol;
  out.probabilities.resize(d);
  out.basis.resize(d, d);
  for (Index a = 0; a < d; ++a) {
    const Index b = slot_of[static_cast<std::size_t>(a)];
    out.probabilities(a) = frame.probabilities(b);
    Eigen::VectorXcd v = frame.basis.col(b);
    const Complex ov = prev.basis.col(a).dot(v);
    if (std::abs(ov) > 0.0) v *= std::conj(ov) / std::abs(ov);
    out.basis.col(a) = v;
  }
  out.continuity_lost = lost;
  return out;
}

SpectralFrame spectral_decompose(const DensityMatrix& rho, const SpectralFrame& prev,
                                 const ToleranceSet& tol) {
  if (prev.dim() != rho.dim()) throw ContractError("previous frame has a different dimension");
  return align_frame(spectral_decompose(rho, tol), prev, tol);
}

double sym_covariance(const DensityMatrix& rho, const HermitianOperator& a,
                      const HermitianOperator& b) {
  if (a.dim() != rho.dim() || b.dim() != rho.dim()) {
    throw ContractError("dimension mismatch in sym_covariance");
  }
  const Index d = rho.dim();
  const Matrix da = a.matrix() - rho.expectation(a) * Matrix::Identity(d, d);
  const Matrix db = b.matrix() - rho.expectation(b) * Matrix::Identity(d, d);
  const Matrix m = rho.matrix() * da;
  return (m.transpose().cwiseProduct(db)).sum().real();
}

double variance(const DensityMatrix& rho, const HermitianOperator& a) {
  return sym_covariance(rho, a, a);
}

Matrix partial_trace(const Matrix& joint, Factorization dims, Subsystem keep) {
  if (dims.d_s <= 0 || dims.d_e <= 0 || joint.rows() != dims.d_s * dims.d_e ||
      joint.cols() != joint.rows()) {
    throw ContractError("joint dimension does not match the factorization " +
                        std::to_string(dims.d_s) + " x " + std::to_string(dims.d_e));
  }
  if (keep == Subsystem::System) {
    Matrix out = Matrix::Zero(dims.d_s, dims.d_s);
    for (Index s = 0; s < dims.d_s; ++s)
      for (Index sp = 0; sp < dims.d_s; ++sp)
        for (Index e = 0; e < dims.d_e; ++e)
          out(s, sp) += joint(s * dims.d_e + e, sp * dims.d_e + e);
    return out;
  }
  Matrix out = Matrix::Zero(dims.d_e, dims.d_e);
  for (Index e = 0; e < dims.d_e; ++e)
    for (Index ep = 0; ep < dims.d_e; ++ep)
      for (Index s = 0; s < dims.d_s; ++s)
        out(e, ep) += joint(s * dims.d_e + e, s * dims.d_e + ep);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& joint, Factorization dims, Subsystem keep,
                            const ToleranceSet& tol) {
  return DensityMatrix(HermitianOperator::hermitized(partial_trace(joint.matrix(), dims, keep)),
                       tol);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double operator_norm(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace pauli {

HermitianOperator x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianOperator::hermitized(m);
}

HermitianOperator y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return HermitianOperator::hermitized(m);
}

HermitianOperator z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianOperator::hermitized(m);
}

}  // namespace pauli

}  // namespace qsl
