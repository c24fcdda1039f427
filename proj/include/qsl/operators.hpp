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

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qsl/errors.hpp"
#include "qsl/tolerances.hpp"

namespace qsl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

double max_abs(const Matrix& m);
Matrix hermitian_part(const Matrix& m);

class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Validates Hermiticity to `tol` (max-abs elementwise) and stores the exact Hermitian part.
  explicit HermitianOperator(const Matrix& m, double tol = ToleranceSet{}.hermiticity);

  // For matrices the library computed itself; takes (m + m^dagger)/2 without checking.
  static HermitianOperator hermitized(const Matrix& m);
  static HermitianOperator zero(Index dim);
  static HermitianOperator identity(Index dim);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Index r, Index c) const { return m_(r, c); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;
  friend HermitianOperator operator*(double s, const HermitianOperator& a) { return a * s; }

 private:
  Matrix m_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(const HermitianOperator& op, const ToleranceSet& tol = {});
  explicit DensityMatrix(const Matrix& m, const ToleranceSet& tol = {});

  static DensityMatrix pure(const Eigen::VectorXcd& psi);
  static DensityMatrix maximally_mixed(Index dim);
  // Qubit state (I + x sx + y sy + z sz)/2.
  static DensityMatrix bloch(double x, double y, double z);

  Index dim() const { return op_.dim(); }
  const Matrix& matrix() const { return op_.matrix(); }
  const HermitianOperator& op() const { return op_; }

  double expectation(const HermitianOperator& a) const;

 private:
  HermitianOperator op_;
};

struct SpectralFrame {
  RealVector probabilities;
  Matrix basis;  // column j is |j>
  double rank_tol = ToleranceSet{}.rank;
  bool continuity_lost = false;

  Index dim() const { return probabilities.size(); }
  bool supported(Index j) const { return probabilities(j) > rank_tol; }
  // <j|X|k> for all j, k.
  Matrix to_frame(const Matrix& x) const { return basis.adjoint() * x * basis; }
  Matrix from_frame(const Matrix& x) const { return basis * x * basis.adjoint(); }
  Matrix reconstruct() const;
};

// Rotates v so that its first largest-magnitude component is real positive.
void fix_phase(Eigen::Ref<Eigen::VectorXcd> v);

// Eigendecomposition ordered by descending p (index tie-break), each
// eigenvector phased so its first largest-magnitude component is real positive.
SpectralFrame spectral_decompose(const DensityMatrix& rho, const ToleranceSet& tol = {});
// Same eigenpairs, relabeled and rephased to follow `prev` continuously.
SpectralFrame spectral_decompose(const DensityMatrix& rho, const SpectralFrame& prev,
                                 const ToleranceSet& tol = {});
// Greedy max-overlap relabeling of `frame` against `prev`, then <j_prev|j> >= 0.
SpectralFrame align_frame(const SpectralFrame& frame, const SpectralFrame& prev,
                          const ToleranceSet& tol = {});

double sym_covariance(const DensityMatrix& rho, const HermitianOperator& a,
                      const HermitianOperator& b);
double variance(const DensityMatrix& rho, const HermitianOperator& a);

struct Factorization {
  Index d_s;
  Index d_e;
};
enum class Subsystem { System, Environment };

Matrix partial_trace(const Matrix& joint, Factorization dims, Subsystem keep);
DensityMatrix partial_trace(const DensityMatrix& joint, Factorization dims, Subsystem keep,
                            const ToleranceSet& tol = {});
Matrix kron(const Matrix& a, const Matrix& b);

double operator_norm(const HermitianOperator& a);

namespace pauli {
HermitianOperator x();
HermitianOperator y();
HermitianOperator z();
}  // namespace pauli

}  // namespace qsl
