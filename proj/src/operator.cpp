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

#include "shadowmm/operator.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "shadowmm/error.hpp"
#include "shadowmm/kernels.hpp"

namespace shadowmm {
namespace {

std::size_t entries(const ComplexMatrix& m) { return static_cast<std::size_t>(m.size()); }

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) + " vs " +
                            std::to_string(b));
  }
}

// FNV-1a over the raw bytes.
struct Fnv1a {
  std::uint64_t h = 1469598103934665603ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ULL;
    }
  }
};

// Isometric real coordinates of a Hermitian matrix: diagonal entries, then
// sqrt(2) Re and sqrt(2) Im of the strict upper triangle. Dot products of
// these vectors equal Hilbert-Schmidt inner products.
RealVector to_real_coords(const ComplexMatrix& m) {
  const int d = static_cast<int>(m.rows());
  RealVector v(d * d);
  int idx = 0;
  for (int i = 0; i < d; ++i) v[idx++] = m(i, i).real();
  const double s = std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      v[idx++] = s * m(i, j).real();
      v[idx++] = s * m(i, j).imag();
    }
  }
  return v;
}

ComplexMatrix from_real_coords(const RealVector& v, int d) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  int idx = 0;
  for (int i = 0; i < d; ++i) m(i, i) = v[idx++];
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Complex z(s * v[idx], s * v[idx + 1]);
      idx += 2;
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator HermitianOperator::from_matrix(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw InvalidArgument("Hermitian operator must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw InvalidArgument("matrix is not Hermitian (max |m - m^dagger| = " + std::to_string(asym) +
                          ")");
  }
  return HermitianOperator(0.5 * (m + m.adjoint()));
}

HermitianOperator HermitianOperator::identity(int dim) {
  if (dim < 1) throw InvalidArgument("dimension must be >= 1");
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(int dim) {
  if (dim < 1) throw InvalidArgument("dimension must be >= 1");
  return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

RealVector HermitianOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double HermitianOperator::min_eigenvalue() const { return eigenvalues()(0); }

double HermitianOperator::max_eigenvalue() const {
  const RealVector ev = eigenvalues();
  return ev(ev.size() - 1);
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  require_same_dim(dim(), o.dim(), "operator +");
  return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  require_same_dim(dim(), o.dim(), "operator -");
  return HermitianOperator(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return HermitianOperator(s * m_); }

namespace pauli {
HermitianOperator I() { return HermitianOperator::identity(2); }
HermitianOperator X() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianOperator::from_matrix(m);
}
HermitianOperator Y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return HermitianOperator::from_matrix(m);
}
HermitianOperator Z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianOperator::from_matrix(m);
}
}  // namespace pauli

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a.dim(), b.dim(), "hs_inner");
  const Complex z = kernels::active().cdot(a.matrix().data(), b.matrix().data(), entries(a.matrix()));
  const double scale = std::max(1.0, std::abs(z.real()));
  if (std::abs(z.imag()) > kHermitianTol * scale) {
    throw InvalidArgument("hs_inner: imaginary part " + std::to_string(z.imag()) +
                          " on Hermitian inputs");
  }
  return z.real();
}

double hs_norm(const HermitianOperator& a) { return std::sqrt(std::max(0.0, hs_inner(a, a))); }

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  const int da = a.dim();
  const int db = b.dim();
  ComplexMatrix m(da * db, da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) m.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  }
  return HermitianOperator::from_matrix(m);
}

// ---------------------------------------------------------------------------
// OperatorBasis

OperatorBasis::OperatorBasis(std::vector<HermitianOperator> elements, double gram_tol)
    : dim_(elements.empty() ? 0 : elements.front().dim()),
      gram_tol_(gram_tol),
      elements_(std::move(elements)) {
  if (elements_.empty()) throw InvalidArgument("operator basis must have at least one element");
  for (const auto& e : elements_) require_same_dim(dim_, e.dim(), "operator basis");
  if (static_cast<long>(elements_.size()) > static_cast<long>(dim_) * dim_) {
    throw InvalidArgument("operator basis has more than d^2 elements");
  }
  const RealMatrix g = gram();
  const double dev = (g - RealMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  if (dev > gram_tol_) {
    throw InvalidArgument("operator basis is not orthonormal (Gram deviation " +
                          std::to_string(dev) + ")");
  }
  Fnv1a h;
  const std::int64_t header[2] = {dim_, static_cast<std::int64_t>(elements_.size())};
  h.bytes(header, sizeof(header));
  for (const auto& e : elements_) h.bytes(e.matrix().data(), entries(e.matrix()) * sizeof(Complex));
  hash_ = h.h;
}

RealVector OperatorBasis::coords(const HermitianOperator& a) const {
  require_same_dim(dim_, a.dim(), "basis coordinates");
  const auto& k = kernels::active();
  RealVector c(size());
  for (int i = 0; i < size(); ++i) {
    c[i] = k.cdot(elements_[static_cast<std::size_t>(i)].matrix().data(), a.matrix().data(),
                  entries(a.matrix()))
               .real();
  }
  return c;
}

HermitianOperator OperatorBasis::combine(const RealVector& c) const {
  if (c.size() != size()) throw DimensionMismatch("basis combine: coefficient length mismatch");
  const auto& k = kernels::active();
  ComplexMatrix m = ComplexMatrix::Zero(dim_, dim_);
  for (int i = 0; i < size(); ++i) {
    k.caxpy(c[i], elements_[static_cast<std::size_t>(i)].matrix().data(), m.data(), entries(m));
  }
  return HermitianOperator::from_matrix(m);
}

double OperatorBasis::residual(const HermitianOperator& a) const {
  return hs_norm(a - combine(coords(a)));
}

RealMatrix OperatorBasis::gram() const {
  RealMatrix g(size(), size());
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j <= i; ++j) {
      g(i, j) = hs_inner(elements_[static_cast<std::size_t>(i)], elements_[static_cast<std::size_t>(j)]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

OperatorBasis pauli_basis_xz() {
  const double s = 1.0 / std::sqrt(2.0);
  return OperatorBasis({s * pauli::I(), s * pauli::X(), s * pauli::Z()});
}

OperatorBasis hermitian_basis(int dim) {
  if (dim < 1) throw InvalidArgument("dimension must be >= 1");
  std::vector<HermitianOperator> out;
  out.reserve(static_cast<std::size_t>(dim) * dim);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(i, i) = 1.0;
    out.push_back(HermitianOperator::from_matrix(m));
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      ComplexMatrix re = ComplexMatrix::Zero(dim, dim);
      re(i, j) = s;
      re(j, i) = s;
      out.push_back(HermitianOperator::from_matrix(re));
      ComplexMatrix im = ComplexMatrix::Zero(dim, dim);
      im(i, j) = Complex(0, -s);
      im(j, i) = Complex(0, s);
      out.push_back(HermitianOperator::from_matrix(im));
    }
  }
  return OperatorBasis(std::move(out));
}

OperatorBasis tensor_basis(const OperatorBasis& a, const OperatorBasis& b) {
  std::vector<HermitianOperator> out;
  out.reserve(a.elements().size() * b.elements().size());
  for (const auto& x : a.elements()) {
    for (const auto& y : b.elements()) out.push_back(kron(x, y));
  }
  return OperatorBasis(std::move(out), std::max(a.gram_tol(), b.gram_tol()));
}

OperatorBasis span_basis(const std::vector<HermitianOperator>& ops, double rank_tol) {
  if (ops.empty()) throw InvalidArgument("span_basis: no operators");
  const int d = ops.front().dim();
  RealMatrix cols(d * d, static_cast<long>(ops.size()));
  for (std::size_t j = 0; j < ops.size(); ++j) {
    require_same_dim(d, ops[j].dim(), "span_basis");
    cols.col(static_cast<long>(j)) = to_real_coords(ops[j].matrix());
  }
  Eigen::JacobiSVD<RealMatrix> svd(cols, Eigen::ComputeThinU);
  const RealVector& sv = svd.singularValues();
  const double cutoff = rank_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  std::vector<HermitianOperator> out;
  for (long k = 0; k < sv.size(); ++k) {
    if (sv(k) <= cutoff) break;
    out.push_back(HermitianOperator::from_matrix(from_real_coords(svd.matrixU().col(k), d)));
  }
  if (out.empty()) throw RankDeficient("span_basis: operators span the zero space");
  return OperatorBasis(std::move(out));
}

RealMatrix coefficient_matrix(const std::vector<HermitianOperator>& effects,
                              const OperatorBasis& basis, double tol) {
  RealMatrix r(static_cast<long>(effects.size()), basis.size());
  for (std::size_t j = 0; j < effects.size(); ++j) {
    const RealVector c = basis.coords(effects[j]);
    const double res = hs_norm(effects[j] - basis.combine(c));
    if (res > tol) throw EffectOutsideSpan(j, res);
    r.row(static_cast<long>(j)) = c.transpose();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Povm

namespace {

void validate_resolution(const std::vector<HermitianOperator>& effects, int dim) {
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& e : effects) sum += e.matrix();
  const double dev = (sum - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (dev > kPovmTol) {
    throw InvalidArgument("POVM effects do not sum to identity (max deviation " +
                          std::to_string(dev) + ")");
  }
}

void validate_rank(const RealMatrix& r) {
  Eigen::ColPivHouseholderQR<RealMatrix> qr(r);
  qr.setThreshold(1e-10);
  if (qr.rank() != r.cols()) {
    throw RankDeficient("POVM coefficient matrix has rank " + std::to_string(qr.rank()) +
                        " < span dimension " + std::to_string(r.cols()));
  }
}

}  // namespace

Povm Povm::create(std::vector<HermitianOperator> effects, OperatorBasis basis) {
  if (effects.empty()) throw InvalidArgument("POVM must have at least one effect");
  const int d = basis.dim();
  for (std::size_t j = 0; j < effects.size(); ++j) {
    require_same_dim(d, effects[j].dim(), "POVM effect");
    const double mn = effects[j].min_eigenvalue();
    if (mn < -kPovmTol) {
      throw InvalidArgument("POVM effect " + std::to_string(j) + " is not PSD (min eigenvalue " +
                            std::to_string(mn) + ")");
    }
  }
  validate_resolution(effects, d);
  RealMatrix r = coefficient_matrix(effects, basis);
  validate_rank(r);
  return Povm(std::move(effects), std::move(basis), std::move(r));
}

Povm Povm::create(std::vector<HermitianOperator> effects) {
  if (effects.empty()) throw InvalidArgument("POVM must have at least one effect");
  OperatorBasis basis = span_basis(effects);
  return create(std::move(effects), std::move(basis));
}

Povm build_xz_povm() {
  const auto i = pauli::I();
  const auto x = pauli::X();
  const auto z = pauli::Z();
  return Povm::create({0.25 * (i + x), 0.25 * (i - x), 0.25 * (i + z), 0.25 * (i - z)},
                      pauli_basis_xz());
}

Povm tensor_povm(const Povm& a, const Povm& b, std::size_t max_effects) {
  const auto na = static_cast<std::size_t>(a.size());
  const auto nb = static_cast<std::size_t>(b.size());
  if (na * nb > max_effects) {
    throw ResourceCap("tensor POVM would have " + std::to_string(na * nb) +
                      " effects, above the cap of " + std::to_string(max_effects));
  }
  std::vector<HermitianOperator> effects;
  effects.reserve(na * nb);
  for (const auto& ea : a.effects()) {
    for (const auto& eb : b.effects()) effects.push_back(kron(ea, eb));
  }
  validate_resolution(effects, a.dim() * b.dim());

  // Products of PSD factors are PSD and the Kronecker product of full-column-
  // rank matrices has full column rank, so only the sum is re-checked.
  const RealMatrix& ra = a.coeff_matrix();
  const RealMatrix& rb = b.coeff_matrix();
  RealMatrix r(ra.rows() * rb.rows(), ra.cols() * rb.cols());
  for (long i = 0; i < ra.rows(); ++i) {
    for (long k = 0; k < ra.cols(); ++k) {
      r.block(i * rb.rows(), k * rb.cols(), rb.rows(), rb.cols()) = ra(i, k) * rb;
    }
  }
  return Povm(std::move(effects), tensor_basis(a.basis(), b.basis()), std::move(r));
}

Povm tensor_power(const Povm& a, int n, std::size_t max_effects) {
  if (n < 1) throw InvalidArgument("tensor power must be >= 1");
  Povm out = a;
  for (int i = 1; i < n; ++i) out = tensor_povm(out, a, max_effects);
  return out;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix DensityMatrix::from_operator(const HermitianOperator& op, double tol) {
  const double tr = op.trace();
  if (std::abs(tr - 1.0) > tol) {
    throw InvalidArgument("density matrix trace " + std::to_string(tr) + " != 1");
  }
  const double mn = op.min_eigenvalue();
  if (mn < -tol) {
    throw InvalidArgument("density matrix has negative eigenvalue " + std::to_string(mn));
  }
  return DensityMatrix(op);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(HermitianOperator::identity(dim) * (1.0 / dim));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double nrm = psi.squaredNorm();
  if (psi.size() < 1 || nrm <= 0.0) throw InvalidArgument("pure state vector must be nonzero");
  return DensityMatrix(HermitianOperator::from_matrix(psi * psi.adjoint() / nrm));
}

int numerical_rank(const HermitianOperator& a, double threshold) {
  const RealVector ev = a.eigenvalues();
  return static_cast<int>((ev.array() > threshold).count());
}

}  // namespace shadowmm
