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

// Reconstruction coefficients for a fixed POVM: the canonical (minimum-norm)
// solution, the state-dependent minimum-variance solution, an independent
// KKT oracle for the latter, dual frames, and the estimator variance.
//
// A coefficient vector x is feasible for observable O when
// sum_j x_j E_j = O, i.e. R^T x = o in the POVM's basis. Coefficients are
// real: for Hermitian effects and observables, R and o are real, and the real
// part of any complex feasible x is feasible with no larger variance.

#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "shadowmm/operator.hpp"

namespace shadowmm {

inline constexpr double kFeasibilityTol = 1e-8;
inline constexpr double kProbabilityFloor = 1e-14;
inline constexpr double kDefaultRegularization = 1e-6;
inline constexpr double kConditionLimit = 1e12;

/// Expansion coefficients o_k = <O, B_k> of an observable, tagged with the basis.
struct ObservableCoeffs {
  RealVector values;
  std::uint64_t basis_hash = 0;
};

/// Throws ObservableOutsideSpan when ||O - sum_k o_k B_k||_HS > tol.
ObservableCoeffs observable_coeffs(const HermitianOperator& obs, const OperatorBasis& basis,
                                   double tol = kSpanTol);

class CoefficientVector {
 public:
  /// Computes the residual ||R^T x - o||_2 and rejects it above kFeasibilityTol.
  static CoefficientVector create(RealVector values, const Povm& povm, const ObservableCoeffs& o);
  /// Stores x without a feasibility requirement (residual still recorded).
  static CoefficientVector unchecked(RealVector values, const Povm& povm, const ObservableCoeffs& o);

  const RealVector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int j) const { return values_[j]; }
  std::uint64_t basis_hash() const { return basis_hash_; }
  double residual() const { return residual_; }
  bool feasible() const { return residual_ <= kFeasibilityTol; }

 private:
  CoefficientVector(RealVector v, std::uint64_t h, double r)
      : values_(std::move(v)), basis_hash_(h), residual_(r) {}
  RealVector values_;
  std::uint64_t basis_hash_;
  double residual_;
};

/// Outcome distribution p_j = Tr(rho E_j) of a specific state.
class ProbabilityVector {
 public:
  const RealVector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int j) const { return values_[j]; }
  const DensityMatrix& source_state() const { return *source_; }

 private:
  ProbabilityVector(RealVector v, std::shared_ptr<const DensityMatrix> s)
      : values_(std::move(v)), source_(std::move(s)) {}
  friend ProbabilityVector probabilities(const DensityMatrix& rho, const Povm& povm);
  RealVector values_;
  std::shared_ptr<const DensityMatrix> source_;
};

/// p_j = hs_inner(E_j, rho); values in [-1e-10, 0) are clamped to 0 and the
/// vector renormalized.
ProbabilityVector probabilities(const DensityMatrix& rho, const Povm& povm);

/// x_MP = R (R^T R)^{-1} o, the minimum Euclidean-norm feasible vector.
CoefficientVector canonical_coefficients(const Povm& povm, const ObservableCoeffs& o);

/// x* = P^{-1} R (R^T P^{-1} R)^{-1} o with P = diag(p): the feasible x
/// minimizing sum_j p_j x_j^2. Throws ZeroProbability when some p_j <= floor.
CoefficientVector optimal_coefficients_for_state(const Povm& povm, const ObservableCoeffs& o,
                                                 const ProbabilityVector& p,
                                                 double p_floor = kProbabilityFloor);
/// Same for an arbitrary nonnegative weight vector (the pure QP, used by the
/// optimizer and the oracle checks).
RealVector optimal_coefficients_for_weights(const Povm& povm, const RealVector& o,
                                            std::span<const double> p,
                                            double p_floor = kProbabilityFloor);

/// Independent route: dense symmetric-indefinite solve of the KKT system
///   [2P  R] [x  ]   [0]
///   [R^T 0] [-mu] = [o].
/// Works with p_j = 0 as long as the system is nonsingular; throws SingularKKT otherwise.
CoefficientVector qp_inner_oracle(const Povm& povm, const ObservableCoeffs& o,
                                  const ProbabilityVector& p);
RealVector qp_inner_oracle_weights(const Povm& povm, const RealVector& o,
                                   std::span<const double> p);

/// sum_j p_j x_j^2 - (sum_j p_j x_j)^2, pairwise-summed.
double variance(std::span<const double> x, std::span<const double> p);
double variance(const CoefficientVector& x, const ProbabilityVector& p);

/// sum_j x_j^2 E_j.
HermitianOperator second_moment_operator(std::span<const double> x, const Povm& povm);
/// lambda_max(sum_j x_j^2 E_j) = max over states of the estimator's second moment.
double shadow_norm_bound(const CoefficientVector& x, const Povm& povm);

/// E_j -> (1 - eps) E_j + (eps / n) I. Keeps the basis when I is already in
/// the span, so existing ObservableCoeffs remain valid.
Povm regularize_povm(const Povm& povm, double eps);

enum class DualFrameSource { kCanonical, kStateDependent, kOther };

struct DualFrame {
  std::vector<HermitianOperator> elements;
  DualFrameSource source = DualFrameSource::kOther;
};

/// L_MP = R (R^T R)^{-1}.
RealMatrix canonical_pseudo_inverse(const Povm& povm);
/// L*(p) = P^{-1} R (R^T P^{-1} R)^{-1}.
RealMatrix state_pseudo_inverse(const Povm& povm, const ProbabilityVector& p,
                                double p_floor = kProbabilityFloor);

/// eta_j = sum_k L_jk B_k. Throws NotPseudoInverse unless R^T L = I_D within 1e-8.
DualFrame dual_frame(const RealMatrix& l, const Povm& povm,
                     DualFrameSource source = DualFrameSource::kOther);

}  // namespace shadowmm
