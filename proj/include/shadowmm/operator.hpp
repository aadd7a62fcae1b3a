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

// Hilbert-Schmidt operator algebra: Hermitian operators, orthonormal operator
// bases, POVMs and their coefficient matrices.
//
// All types are immutable values once constructed.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace shadowmm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPovmTol = 1e-10;
inline constexpr double kSpanTol = 1e-10;
inline constexpr std::size_t kDefaultMaxEffects = 10'000'000;

class HermitianOperator {
 public:
  /// Checks m == m^dagger within tol * max(1, max|m_ij|) and stores the
  /// exactly Hermitian part (m + m^dagger) / 2.
  static HermitianOperator from_matrix(const ComplexMatrix& m, double tol = kHermitianTol);
  static HermitianOperator identity(int dim);
  static HermitianOperator zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

  double trace() const { return m_.trace().real(); }
  /// Ascending.
  RealVector eigenvalues() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;
  friend HermitianOperator operator*(double s, const HermitianOperator& a) { return a * s; }

 private:
  explicit HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

namespace pauli {
HermitianOperator I();
HermitianOperator X();
HermitianOperator Y();
HermitianOperator Z();
}  // namespace pauli

/// Tr(a^dagger b). Real for Hermitian inputs; throws if |Im| > 1e-12 (scaled).
double hs_inner(const HermitianOperator& a, const HermitianOperator& b);
double hs_norm(const HermitianOperator& a);

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

/// Orthonormal (under hs_inner) family of Hermitian operators.
class OperatorBasis {
 public:
  /// Validates orthonormality of the Gram matrix within gram_tol.
  OperatorBasis(std::vector<HermitianOperator> elements, double gram_tol = 1e-10);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const HermitianOperator& operator[](int k) const { return elements_[static_cast<std::size_t>(k)]; }
  const std::vector<HermitianOperator>& elements() const { return elements_; }
  double gram_tol() const { return gram_tol_; }
  /// Content hash; coefficient vectors carry it to detect basis mixups.
  std::uint64_t hash() const { return hash_; }

  /// c_k = hs_inner(B_k, a).
  RealVector coords(const HermitianOperator& a) const;
  HermitianOperator combine(const RealVector& c) const;
  /// ||a - sum_k c_k B_k||_HS, the part of a outside the span.
  double residual(const HermitianOperator& a) const;
  RealMatrix gram() const;

 private:
  int dim_;
  double gram_tol_;
  std::vector<HermitianOperator> elements_;
  std::uint64_t hash_;
};

/// {I, X, Z} / sqrt(2).
OperatorBasis pauli_basis_xz();
/// Orthonormal basis of the full space of d x d Hermitian matrices (d^2 elements).
OperatorBasis hermitian_basis(int dim);
/// Products B_k (x) C_l with k major.
OperatorBasis tensor_basis(const OperatorBasis& a, const OperatorBasis& b);
/// Orthonormal basis of span{ops}, found by SVD in an isometric real coordinate system.
OperatorBasis span_basis(const std::vector<HermitianOperator>& ops, double rank_tol = 1e-10);

/// R_jk = hs_inner(E_j, B_k). Throws EffectOutsideSpan when an effect's
/// projection residual exceeds tol.
RealMatrix coefficient_matrix(const std::vector<HermitianOperator>& effects,
                              const OperatorBasis& basis, double tol = kSpanTol);

class Povm {
 public:
  /// Validates PSD effects, resolution of identity and rank(R) == D.
  static Povm create(std::vector<HermitianOperator> effects, OperatorBasis basis);
  /// Same, with the basis derived from the span of the effects.
  static Povm create(std::vector<HermitianOperator> effects);

  int dim() const { return basis_.dim(); }
  int size() const { return static_cast<int>(effects_.size()); }
  int span_dim() const { return basis_.size(); }
  const HermitianOperator& effect(int j) const { return effects_[static_cast<std::size_t>(j)]; }
  const std::vector<HermitianOperator>& effects() const { return effects_; }
  const OperatorBasis& basis() const { return basis_; }
  /// n x D, column-major.
  const RealMatrix& coeff_matrix() const { return r_; }

 private:
  Povm(std::vector<HermitianOperator> effects, OperatorBasis basis, RealMatrix r)
      : effects_(std::move(effects)), basis_(std::move(basis)), r_(std::move(r)) {}

  friend Povm tensor_povm(const Povm& a, const Povm& b, std::size_t max_effects);
  friend Povm regularize_povm(const Povm& povm, double eps);

  std::vector<HermitianOperator> effects_;
  OperatorBasis basis_;
  RealMatrix r_;
};

/// The qubit POVM [(I+X)/4, (I-X)/4, (I+Z)/4, (I-Z)/4] in that order.
Povm build_xz_povm();
/// Effects A_a (x) B_b, a-index major. R is the Kronecker product of the factors'.
Povm tensor_povm(const Povm& a, const Povm& b, std::size_t max_effects = kDefaultMaxEffects);
/// N-fold tensor power.
Povm tensor_power(const Povm& a, int n, std::size_t max_effects = kDefaultMaxEffects);

class DensityMatrix {
 public:
  /// Requires trace 1 and minimum eigenvalue >= -1e-10.
  static DensityMatrix from_operator(const HermitianOperator& op, double tol = kPovmTol);
  static DensityMatrix maximally_mixed(int dim);
  /// |psi><psi| / <psi|psi>.
  static DensityMatrix pure(const ComplexVector& psi);

  int dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  const ComplexMatrix& matrix() const { return op_.matrix(); }

 private:
  explicit DensityMatrix(HermitianOperator op) : op_(std::move(op)) {}
  HermitianOperator op_;
};

/// Numerical rank: eigenvalues above threshold.
int numerical_rank(const HermitianOperator& a, double threshold = 1e-8);

}  // namespace shadowmm
