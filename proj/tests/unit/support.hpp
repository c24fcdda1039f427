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

#include <cmath>
#include <complex>

#include "qsl/operators.hpp"
#include "qsl/sampling.hpp"

namespace qsl::test {

inline const Complex I{0.0, 1.0};

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix sx() { return pauli::x().matrix(); }
inline Matrix sy() { return pauli::y().matrix(); }
inline Matrix sz() { return pauli::z().matrix(); }
inline Matrix id(Index d) { return Matrix::Identity(d, d); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// -i[H, rho]
inline HermitianOperator unitary_drive(const Matrix& h, const Matrix& rho) {
  return HermitianOperator::hermitized(-I * commutator(h, rho));
}

inline double real_trace(const Matrix& a, const Matrix& b) { return (a * b).trace().real(); }

inline double dist(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

// Dephasing qubit in the x-z plane, written out by hand: d/dt (x, z) = (-2 gamma x, 0).
inline Matrix dephasing_drive(double x, double gamma) { return -gamma * x * sx(); }

}  // namespace qsl::test
