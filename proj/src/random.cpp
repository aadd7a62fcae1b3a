// Copyright 2026 The shadowmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shadowmm/random.hpp"

#include <cmath>

#include "shadowmm/error.hpp"

namespace shadowmm::random {
namespace {

ComplexMatrix ginibre(int rows, int cols, CounterRng& rng) {
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  return g;
}

}  // namespace

HermitianOperator hermitian(int dim, CounterRng& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  return HermitianOperator::from_matrix(0.5 * (g + g.adjoint()));
}

HermitianOperator traceless_direction(int dim, CounterRng& rng) {
  ComplexMatrix m = hermitian(dim, rng).matrix();
  m -= (m.trace().real() / dim) * ComplexMatrix::Identity(dim, dim);
  const double nrm = m.norm();
  return HermitianOperator::from_matrix(m / nrm);
}

ComplexMatrix haar_unitary(int dim, CounterRng& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

ComplexVector pure_state_vector(int dim, CounterRng& rng) {
  ComplexVector v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

RealVector dirichlet(int n, double alpha, CounterRng& rng) {
  if (n < 1 || alpha <= 0) throw InvalidArgument("dirichlet: need n >= 1 and alpha > 0");
  RealVector w(n);
  if (alpha == 1.0) {
    for (int i = 0; i < n; ++i) w[i] = -std::log(rng.uniform_open0());
  } else {
    // Marsaglia-Tsang gamma sampler for the general shape.
    for (int i = 0; i < n; ++i) {
      const double shape = alpha < 1.0 ? alpha + 1.0 : alpha;
      const double d = shape - 1.0 / 3.0;
      const double c = 1.0 / std::sqrt(9.0 * d);
      double g = 0.0;
      for (;;) {
        double x = rng.normal();
        double v = 1.0 + c * x;
        if (v <= 0) continue;
        v = v * v * v;
        const double u = rng.uniform_open0();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
          g = d * v;
          break;
        }
      }
      if (alpha < 1.0) g *= std::pow(rng.uniform_open0(), 1.0 / alpha);
      w[i] = g;
    }
  }
  return w / w.sum();
}

DensityMatrix density(int dim, CounterRng& rng, int rank) {
  const int r = (rank <= 0 || rank > dim) ? dim : rank;
  const ComplexMatrix u = haar_unitary(dim, rng);
  const RealVector lam = dirichlet(r, 1.0, rng);
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < r; ++k) rho += lam[k] * u.col(k) * u.col(k).adjoint();
  return DensityMatrix::from_operator(HermitianOperator::from_matrix(rho));
}

Povm povm(int dim, int n, CounterRng& rng, int span) {
  if (dim < 1 || n < 1) throw InvalidArgument("random povm: need dim >= 1 and n >= 1");
  const int seeds = (span <= 0 || span > n) ? n : span;
  std::vector<ComplexMatrix> base;
  for (int i = 0; i < seeds; ++i) {
    const ComplexMatrix a = ginibre(dim, dim, rng);
    base.push_back(a * a.adjoint());
  }
  std::vector<ComplexMatrix> g(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    if (seeds == n) {
      g[static_cast<std::size_t>(j)] = base[static_cast<std::size_t>(j)];
      continue;
    }
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < seeds; ++i) m += rng.uniform() * base[static_cast<std::size_t>(i)];
    g[static_cast<std::size_t>(j)] = m;
  }
  ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
  for (const auto& m : g) s += m;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
  const ComplexMatrix s_inv_half = es.operatorInverseSqrt();
  std::vector<HermitianOperator> effects;
  effects.reserve(g.size());
  for (const auto& m : g) {
    effects.push_back(HermitianOperator::from_matrix(s_inv_half * m * s_inv_half, 1e-10));
  }
  return Povm::create(std::move(effects));
}

}  // namespace shadowmm::random
