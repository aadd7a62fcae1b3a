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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "shadowmm/error.hpp"
#include "shadowmm/operator.hpp"
#include "shadowmm/random.hpp"

using namespace shadowmm;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Hermitian construction symmetrizes within tolerance and rejects the rest") {
  ComplexMatrix m(2, 2);
  m << 1.0, Complex(0.5, 1e-14), Complex(0.5, 0.0), -2.0;
  const auto h = HermitianOperator::from_matrix(m);
  CHECK(h.matrix() == h.matrix().adjoint());
  CHECK(h.trace() == doctest::Approx(-1.0));

  m(0, 1) = Complex(0.5, 0.1);
  CHECK_THROWS_AS(HermitianOperator::from_matrix(m), InvalidArgument);
  CHECK_THROWS_AS(HermitianOperator::from_matrix(ComplexMatrix(2, 3)), InvalidArgument);
  CHECK_THROWS_AS(HermitianOperator::identity(0), InvalidArgument);
}

TEST_CASE("Pauli algebra and Hilbert-Schmidt products") {
  CHECK(hs_inner(pauli::X(), pauli::X()) == doctest::Approx(2.0));
  CHECK(hs_inner(pauli::X(), pauli::Z()) == doctest::Approx(0.0));
  CHECK(hs_norm(pauli::Y()) == doctest::Approx(std::sqrt(2.0)));
  const ComplexMatrix xz = pauli::X().matrix() * pauli::Z().matrix();
  CHECK(max_abs(xz + pauli::Z().matrix() * pauli::X().matrix()) < 1e-15);
  CHECK(max_abs(kron(pauli::X(), pauli::Z()).matrix() - oracle::kron(oracle::pauli_x(), oracle::pauli_z())) == 0.0);
  CHECK_THROWS_AS(hs_inner(pauli::X(), HermitianOperator::identity(3)), DimensionMismatch);
  const RealVector ev = (pauli::X() + 0.5 * pauli::Z()).eigenvalues();
  CHECK(ev[0] == doctest::Approx(-std::sqrt(1.25)));
  CHECK(ev[1] == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("bases are orthonormal and round-trip coordinates") {
  for (int d : {1, 2, 3, 4}) {
    const OperatorBasis b = hermitian_basis(d);
    CHECK(b.size() == d * d);
    CHECK((b.gram() - RealMatrix::Identity(d * d, d * d)).cwiseAbs().maxCoeff() < 1e-14);
    CounterRng rng(1, static_cast<std::uint64_t>(d));
    const HermitianOperator a = random::hermitian(d, rng);
    CHECK(max_abs(b.combine(b.coords(a)).matrix() - a.matrix()) < 1e-13);
    CHECK(b.residual(a) < 1e-13);
  }
  const OperatorBasis xz = pauli_basis_xz();
  CHECK(xz.size() == 3);
  CHECK(xz.residual(pauli::Y()) == doctest::Approx(std::sqrt(2.0)));
  CHECK(xz.hash() != hermitian_basis(2).hash());
  CHECK(xz.hash() == pauli_basis_xz().hash());

  const OperatorBasis t = tensor_basis(xz, xz);
  CHECK(t.size() == 9);
  CHECK(t.dim() == 4);
  CHECK((t.gram() - RealMatrix::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(OperatorBasis({pauli::X(), pauli::X()}), InvalidArgument);
}

TEST_CASE("span basis has the span dimension") {
  const OperatorBasis s = span_basis({pauli::I(), pauli::X(), pauli::I() + pauli::X(), pauli::Z()});
  CHECK(s.size() == 3);
  CHECK(s.residual(pauli::I() - 2.0 * pauli::Z()) < 1e-12);
  CHECK(s.residual(pauli::Y()) > 1.0);
}

TEST_CASE("XZ POVM matches the reference coefficients") {
  const Povm p = build_xz_povm();
  CHECK(p.size() == 4);
  CHECK(p.dim() == 2);
  CHECK(p.span_dim() == 3);
  const auto eff = oracle::xz_effects();
  const double s = 1.0 / std::sqrt(2.0);
  const RealMatrix ref = oracle::coefficients(eff, {s * oracle::pauli_i(), s * oracle::pauli_x(), s * oracle::pauli_z()});
  CHECK((p.coeff_matrix() - ref).cwiseAbs().maxCoeff() < 1e-15);
  // Each effect is (I +- P)/4: coordinate sqrt(2)/4 along I/sqrt(2).
  CHECK(p.coeff_matrix()(0, 0) == doctest::Approx(std::sqrt(2.0) / 4));
}

TEST_CASE("POVM validation failures") {
  const auto i = pauli::I();
  const auto z = pauli::Z();
  SUBCASE("not summing to identity") {
    CHECK_THROWS_AS(Povm::create({0.5 * (i + z), 0.4 * (i - z)}), InvalidArgument);
  }
  SUBCASE("negative effect") {
    CHECK_THROWS_AS(Povm::create({0.5 * (i + 2.0 * z), 0.5 * (i - 2.0 * z)}), InvalidArgument);
  }
  SUBCASE("effect outside the supplied basis") {
    const double s = 1.0 / std::sqrt(2.0);
    const OperatorBasis b({s * i, s * z});
    const auto x = pauli::X();
    CHECK_THROWS_AS(Povm::create({0.25 * (i + x), 0.25 * (i - x), 0.25 * (i + z), 0.25 * (i - z)}, b),
                    EffectOutsideSpan);
  }
  SUBCASE("rank-deficient coefficient matrix against a larger basis") {
    CHECK_THROWS_AS(Povm::create({0.5 * (i + z), 0.5 * (i - z)}, pauli_basis_xz()), RankDeficient);
  }
  SUBCASE("mixed dimensions") {
    CHECK_THROWS(Povm::create({0.5 * i, 0.5 * i, HermitianOperator::identity(3)}));
  }
  SUBCASE("empty") { CHECK_THROWS_AS(Povm::create({}), InvalidArgument); }
}

TEST_CASE("tensor powers match the reference Kronecker construction") {
  const Povm xz = build_xz_povm();
  for (int n : {1, 2, 3}) {
    const Povm p = tensor_power(xz, n);
    CHECK(p.size() == (1 << (2 * n)));
    CHECK(p.span_dim() == static_cast<int>(std::pow(3, n)));
    const auto ref = oracle::tensor_power(oracle::xz_effects(), n);
    double worst = 0;
    for (int j = 0; j < p.size(); ++j) worst = std::max(worst, max_abs(p.effect(j).matrix() - ref[static_cast<std::size_t>(j)]));
    CHECK(worst < 1e-15);
    // R must agree with direct projection on the tensor basis.
    const RealMatrix direct = coefficient_matrix(p.effects(), p.basis());
    CHECK((p.coeff_matrix() - direct).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK_THROWS_AS(tensor_power(xz, 3, 63), ResourceCap);
  CHECK_THROWS_AS(tensor_power(xz, 0), InvalidArgument);
}

TEST_CASE("random POVMs are valid and informationally complete when n >= d^2") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    CounterRng rng(3, t);
    const int d = 2 + static_cast<int>(t % 3);
    const Povm p = random::povm(d, d * d + static_cast<int>(t % 4), rng);
    CHECK(p.span_dim() == d * d);
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& e : p.effects()) {
      sum += e.matrix();
      CHECK(e.min_eigenvalue() > -1e-12);
    }
    CHECK(max_abs(sum - ComplexMatrix::Identity(d, d)) < 1e-10);
  }
}

TEST_CASE("density matrices") {
  CHECK(DensityMatrix::maximally_mixed(4).op().trace() == doctest::Approx(1.0));
  ComplexVector psi(2);
  psi << 3.0, Complex(0, 4.0);
  const DensityMatrix rho = DensityMatrix::pure(psi);
  CHECK(rho.op().trace() == doctest::Approx(1.0));
  CHECK(numerical_rank(rho.op()) == 1);
  CHECK(numerical_rank(DensityMatrix::maximally_mixed(3).op()) == 3);
  CHECK_THROWS_AS(DensityMatrix::from_operator(pauli::Z()), InvalidArgument);
  CHECK_THROWS_AS(DensityMatrix::from_operator(HermitianOperator::from_matrix(
                      oracle::pauli_i() + 0.5 * oracle::pauli_z() - 0.5 * oracle::pauli_i() + oracle::pauli_z())),
                  InvalidArgument);
  CHECK_THROWS_AS(DensityMatrix::pure(ComplexVector::Zero(2)), InvalidArgument);

  for (std::uint64_t t = 0; t < 10; ++t) {
    CounterRng rng(5, t);
    const DensityMatrix r = random::density(3, rng, 2);
    CHECK(r.op().trace() == doctest::Approx(1.0));
    CHECK(numerical_rank(r.op()) == 2);
    CHECK(r.op().min_eigenvalue() > -1e-12);
  }
}
