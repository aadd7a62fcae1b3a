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

#include "shadowmm/frame.hpp"

#include <lapacke.h>

#include <cmath>
#include <string>

#include "shadowmm/error.hpp"
#include "shadowmm/kernels.hpp"

namespace shadowmm {
namespace {

void require_basis(const Povm& povm, std::uint64_t hash) {
  if (povm.basis().hash() != hash) {
    throw BasisMismatch("observable coefficients were computed in a different basis than the POVM's");
  }
}

void require_length(long got, long want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": length " + std::to_string(got) + " vs " +
                            std::to_string(want));
  }
}

double feasibility_residual(const RealVector& x, const Povm& povm, const RealVector& o) {
  return (povm.coeff_matrix().transpose() * x - o).norm();
}

RealMatrix weighted_gram(const RealMatrix& r, const RealVector& w) {
  RealMatrix q(r.cols(), r.cols());
  kernels::active().weighted_gram(r.data(), static_cast<std::size_t>(r.rows()),
                                  static_cast<std::size_t>(r.cols()), w.data(), q.data());
  return q;
}

// Cholesky of a symmetric positive definite Gram matrix with the condition guard.
Eigen::LLT<RealMatrix> factor_gram(const RealMatrix& q, const char* what) {
  Eigen::LLT<RealMatrix> llt(q);
  if (llt.info() != Eigen::Success) {
    throw RankDeficient(std::string(what) + ": Gram matrix is not positive definite");
  }
  const double rc = llt.rcond();
  if (!(rc * kConditionLimit >= 1.0)) {
    throw RankDeficient(std::string(what) + ": Gram matrix condition number exceeds 1e12 (rcond " +
                        std::to_string(rc) + ")");
  }
  return llt;
}

RealVector inverse_weights(std::span<const double> p, double p_floor) {
  std::vector<std::size_t> bad;
  RealVector w(static_cast<long>(p.size()));
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(p[j] > p_floor)) {
      bad.push_back(j);
    } else {
      w[static_cast<long>(j)] = 1.0 / p[j];
    }
  }
  if (!bad.empty()) throw ZeroProbability(std::move(bad));
  return w;
}

}  // namespace

ObservableCoeffs observable_coeffs(const HermitianOperator& obs, const OperatorBasis& basis,
                                   double tol) {
  RealVector c = basis.coords(obs);
  const double res = hs_norm(obs - basis.combine(c));
  if (res > tol) throw ObservableOutsideSpan(res);
  return {std::move(c), basis.hash()};
}

CoefficientVector CoefficientVector::unchecked(RealVector values, const Povm& povm,
                                               const ObservableCoeffs& o) {
  require_basis(povm, o.basis_hash);
  require_length(values.size(), povm.size(), "coefficient vector");
  const double res = feasibility_residual(values, povm, o.values);
  return CoefficientVector(std::move(values), o.basis_hash, res);
}

CoefficientVector CoefficientVector::create(RealVector values, const Povm& povm,
                                            const ObservableCoeffs& o) {
  CoefficientVector x = unchecked(std::move(values), povm, o);
  if (!x.feasible()) {
    throw InvalidArgument("coefficient vector is infeasible: ||R^T x - o|| = " +
                          std::to_string(x.residual()));
  }
  return x;
}

ProbabilityVector probabilities(const DensityMatrix& rho, const Povm& povm) {
  if (rho.dim() != povm.dim()) {
    throw DimensionMismatch("probabilities: state dimension " + std::to_string(rho.dim()) +
                            " vs POVM dimension " + std::to_string(povm.dim()));
  }
  RealVector p(povm.size());
  for (int j = 0; j < povm.size(); ++j) {
    double v = hs_inner(povm.effect(j), rho.op());
    if (v < 0.0 && v >= -kPovmTol) v = 0.0;
    if (v < 0.0) {
      throw InvalidArgument("probabilities: negative probability " + std::to_string(v) +
                            " at outcome " + std::to_string(j));
    }
    p[j] = v;
  }
  p /= kernels::active().pairwise_sum(p.data(), static_cast<std::size_t>(p.size()));
  return ProbabilityVector(std::move(p), std::make_shared<const DensityMatrix>(rho));
}

CoefficientVector canonical_coefficients(const Povm& povm, const ObservableCoeffs& o) {
  require_basis(povm, o.basis_hash);
  const RealMatrix& r = povm.coeff_matrix();
  const auto llt = factor_gram(weighted_gram(r, RealVector::Ones(r.rows())), "canonical_coefficients");
  RealVector x = r * llt.solve(o.values);
  return CoefficientVector::create(std::move(x), povm, o);
}

RealVector optimal_coefficients_for_weights(const Povm& povm, const RealVector& o,
                                            std::span<const double> p, double p_floor) {
  const RealMatrix& r = povm.coeff_matrix();
  require_length(static_cast<long>(p.size()), r.rows(), "weights");
  require_length(o.size(), r.cols(), "observable coefficients");
  const RealVector w = inverse_weights(p, p_floor);
  const auto llt = factor_gram(weighted_gram(r, w), "optimal_coefficients_for_state");
  const RealVector y = llt.solve(o);
  RealVector x = r * y;
  kernels::active().hadamard(w.data(), x.data(), x.data(), static_cast<std::size_t>(x.size()));
  return x;
}

CoefficientVector optimal_coefficients_for_state(const Povm& povm, const ObservableCoeffs& o,
                                                 const ProbabilityVector& p, double p_floor) {
  require_basis(povm, o.basis_hash);
  const auto& v = p.values();
  RealVector x = optimal_coefficients_for_weights(
      povm, o.values, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), p_floor);
  return CoefficientVector::create(std::move(x), povm, o);
}

RealVector qp_inner_oracle_weights(const Povm& povm, const RealVector& o,
                                   std::span<const double> p) {
  const RealMatrix& r = povm.coeff_matrix();
  const long n = r.rows();
  const long dd = r.cols();
  require_length(static_cast<long>(p.size()), n, "weights");
  require_length(o.size(), dd, "observable coefficients");
  for (double pj : p) {
    if (pj < 0.0) throw InvalidArgument("qp_inner_oracle: negative weight");
  }
  const long m = n + dd;
  RealMatrix kkt = RealMatrix::Zero(m, m);
  for (long j = 0; j < n; ++j) kkt(j, j) = 2.0 * p[static_cast<std::size_t>(j)];
  kkt.topRightCorner(n, dd) = r;
  kkt.bottomLeftCorner(dd, n) = r.transpose();
  RealVector rhs = RealVector::Zero(m);
  rhs.tail(dd) = o;

  const auto lm = static_cast<lapack_int>(m);
  const double anorm = kkt.cwiseAbs().colwise().sum().maxCoeff();
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(m));
  lapack_int info = LAPACKE_dsysv(LAPACK_COL_MAJOR, 'L', lm, 1, kkt.data(), lm, ipiv.data(),
                                  rhs.data(), lm);
  if (info > 0) throw SingularKKT("qp_inner_oracle: KKT system is exactly singular");
  if (info < 0) throw SingularKKT("qp_inner_oracle: LAPACK argument error " + std::to_string(info));
  double rcond = 0.0;
  info = LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', lm, kkt.data(), lm, ipiv.data(), anorm, &rcond);
  if (info != 0 || !(rcond * 1e14 >= 1.0)) {
    throw SingularKKT("qp_inner_oracle: KKT system is numerically singular (rcond " +
                      std::to_string(rcond) + ")");
  }
  return rhs.head(n);
}

CoefficientVector qp_inner_oracle(const Povm& povm, const ObservableCoeffs& o,
                                  const ProbabilityVector& p) {
  require_basis(povm, o.basis_hash);
  const auto& v = p.values();
  RealVector x = qp_inner_oracle_weights(
      povm, o.values, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
  return CoefficientVector::unchecked(std::move(x), povm, o);
}

double variance(std::span<const double> x, std::span<const double> p) {
  require_length(static_cast<long>(x.size()), static_cast<long>(p.size()), "variance");
  const auto& k = kernels::active();
  const double second = k.weighted_sq_sum(p.data(), x.data(), x.size());
  const double mean = k.weighted_sum(p.data(), x.data(), x.size());
  return second - mean * mean;
}

double variance(const CoefficientVector& x, const ProbabilityVector& p) {
  const auto& xv = x.values();
  const auto& pv = p.values();
  return variance(std::span<const double>(xv.data(), static_cast<std::size_t>(xv.size())),
                  std::span<const double>(pv.data(), static_cast<std::size_t>(pv.size())));
}

HermitianOperator second_moment_operator(std::span<const double> x, const Povm& povm) {
  require_length(static_cast<long>(x.size()), povm.size(), "second_moment_operator");
  const auto& k = kernels::active();
  ComplexMatrix m = ComplexMatrix::Zero(povm.dim(), povm.dim());
  for (int j = 0; j < povm.size(); ++j) {
    const double w = x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    k.caxpy(w, povm.effect(j).matrix().data(), m.data(), static_cast<std::size_t>(m.size()));
  }
  return HermitianOperator::from_matrix(m);
}

double shadow_norm_bound(const CoefficientVector& x, const Povm& povm) {
  const auto& v = x.values();
  return second_moment_operator(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())),
                                povm)
      .max_eigenvalue();
}

Povm regularize_povm(const Povm& povm, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw InvalidArgument("regularization eps must lie in [0, 1), got " + std::to_string(eps));
  }
  if (eps == 0.0) return povm;
  const int n = povm.size();
  const int d = povm.dim();
  const double shift = eps / n;
  const auto id = HermitianOperator::identity(d);
  std::vector<HermitianOperator> effects;
  effects.reserve(static_cast<std::size_t>(n));
  for (const auto& e : povm.effects()) effects.push_back((1.0 - eps) * e + shift * id);

  if (povm.basis().residual(id) <= kSpanTol) {
    const RealVector iota = povm.basis().coords(id);
    RealMatrix r = (1.0 - eps) * povm.coeff_matrix();
    r.rowwise() += shift * iota.transpose();
    return Povm(std::move(effects), povm.basis(), std::move(r));
  }
  return Povm::create(std::move(effects));
}

RealMatrix canonical_pseudo_inverse(const Povm& povm) {
  const RealMatrix& r = povm.coeff_matrix();
  const auto llt = factor_gram(weighted_gram(r, RealVector::Ones(r.rows())), "canonical_pseudo_inverse");
  return r * llt.solve(RealMatrix::Identity(r.cols(), r.cols()));
}

RealMatrix state_pseudo_inverse(const Povm& povm, const ProbabilityVector& p, double p_floor) {
  const RealMatrix& r = povm.coeff_matrix();
  const auto& v = p.values();
  const RealVector w =
      inverse_weights(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), p_floor);
  const auto llt = factor_gram(weighted_gram(r, w), "state_pseudo_inverse");
  return w.asDiagonal() * (r * llt.solve(RealMatrix::Identity(r.cols(), r.cols())));
}

DualFrame dual_frame(const RealMatrix& l, const Povm& povm, DualFrameSource source) {
  const RealMatrix& r = povm.coeff_matrix();
  if (l.rows() != r.rows() || l.cols() != r.cols()) {
    throw DimensionMismatch("dual_frame: L must be n x D");
  }
  const double dev = (r.transpose() * l - RealMatrix::Identity(r.cols(), r.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-8) throw NotPseudoInverse(dev);
  DualFrame frame;
  frame.source = source;
  frame.elements.reserve(static_cast<std::size_t>(l.rows()));
  for (long j = 0; j < l.rows(); ++j) frame.elements.push_back(povm.basis().combine(l.row(j).transpose()));
  return frame;
}

}  // namespace shadowmm
