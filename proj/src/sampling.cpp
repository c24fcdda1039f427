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

#include "qsl/sampling.hpp"

#include <cmath>

namespace qsl {

Matrix random_gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = n(rng);
      const double im = n(rng);
      m(r, c) = Complex(re, im) / std::sqrt(2.0);
    }
  return m;
}

Matrix random_unitary(Index dim, Rng& rng) {
  const Matrix g = random_gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

HermitianOperator random_hermitian(Index dim, Rng& rng, double scale) {
  const Matrix g = random_gaussian_matrix(dim, dim, rng);
  return HermitianOperator::hermitized(g * scale);
}

Eigen::VectorXcd random_state_vector(Index dim, Rng& rng) {
  Eigen::VectorXcd v = random_gaussian_matrix(dim, 1, rng).col(0);
  return v / v.norm();
}

DensityMatrix random_pure_state(Index dim, Rng& rng) {
  return DensityMatrix::pure(random_state_vector(dim, rng));
}

DensityMatrix random_full_rank_state(Index dim, Rng& rng, double floor) {
  std::exponential_distribution<double> e(1.0);
  RealVector p(dim);
  for (Index j = 0; j < dim; ++j) p(j) = e(rng);
  p /= p.sum();
  p = p.cwiseMax(floor);
  p /= p.sum();
  const Matrix u = random_unitary(dim, rng);
  return DensityMatrix(HermitianOperator::hermitized(u * p.cast<Complex>().asDiagonal() * u.adjoint()));
}

Generator random_generator(Index dim, Rng& rng) {
  const HermitianOperator h = random_hermitian(dim, rng);
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> rate(0.0, 1.0);
  std::vector<LindbladChannel> channels;
  const int n = count(rng);
  for (int a = 0; a < n; ++a) {
    const double g = rate(rng);
    channels.push_back({g, random_gaussian_matrix(dim, dim, rng)});
  }
  return Generator::constant(h, std::move(channels));
}

std::vector<HermitianOperator> random_povm(Index dim, Index outcomes, Rng& rng) {
  const Matrix v = random_gaussian_matrix(dim, outcomes, rng);
  const Matrix s = v * v.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const RealVector inv = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const Matrix s_inv_half = es.eigenvectors() * inv.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  std::vector<HermitianOperator> povm;
  for (Index a = 0; a < outcomes; ++a) {
    const Eigen::VectorXcd w = s_inv_half * v.col(a);
    povm.push_back(HermitianOperator::hermitized(w * w.adjoint()));
  }
  return povm;
}

}  // namespace qsl
