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

// Worst-case variance of unbiased linear estimators.
//
// For a POVM {E_j} and observable O, the estimator with coefficients x has
// variance f(x, rho) = sum_j p_j x_j^2 - (sum_j p_j x_j)^2 with
// p_j = Tr(rho E_j). f is convex in x and concave in rho, so
//
//   min_x max_rho f(x, rho) = max_rho F(rho),   F(rho) = min_x f(x, rho),
//
// where the inner minimum has a closed form (optimal_coefficients_for_state).
// F is maximized over density matrices by projected gradient ascent using
// the envelope gradient
//
//   dF/drho = sum_j x*_j(rho)^2 E_j - 2 Tr(O rho) O.
//
// The POVM is first regularized (E_j -> (1-eps) E_j + eps/n I) so that every
// p_j >= eps/n and the closed form is defined on the whole state space. All
// reported quantities refer to the regularized POVM.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "shadowmm/frame.hpp"
#include "shadowmm/operator.hpp"

namespace shadowmm {

struct MinimaxOptions {
  int max_iters = 2000;
  /// Relative projected-gradient norm, see AscentResult::projected_gradient_norm.
  double grad_tol = 1e-7;
  /// Relative objective change over value_window iterations.
  double value_tol = 1e-10;
  int value_window = 20;
  int restarts = 8;
  double eps_regularization = kDefaultRegularization;
  std::uint64_t seed = 0;
  double backtrack_beta = 0.5;
  double armijo_c = 1e-4;
  /// Restarts run concurrently on up to this many threads.
  int threads = 1;
  /// Projected Newton steps applied to the best restart (0 disables).
  int polish_iters = 20;

  /// Throws ConfigError.
  void validate() const;
};

/// Euclidean projection of a vector onto the probability simplex.
RealVector project_to_simplex(const RealVector& v);
/// Nearest (Frobenius) PSD, trace-one matrix to the Hermitian part of m.
ComplexMatrix project_to_density(const ComplexMatrix& m);

/// Value and gradient of a concave objective on density matrices.
struct ConcaveObjective {
  std::function<double(const ComplexMatrix&)> value;
  std::function<double(const ComplexMatrix&, ComplexMatrix&)> value_and_gradient;
};

struct AscentResult {
  ComplexMatrix rho;
  double value = 0.0;
  int iterations = 0;
  /// ||rho_k - Pi(rho_k + a G_k)||_F / (a max(1, |F_k|)) at the last accepted step a.
  double projected_gradient_norm = 0.0;
  bool converged = false;
  /// Objective after each accepted step, starting with the initial point.
  std::vector<double> history;
};

/// Monotone projected gradient ascent on the spectrahedron. Each step tries
/// a Barzilai-Borwein length first, then backtracks by opts.backtrack_beta
/// until F(rho+) >= F(rho) + c <G, rho+ - rho>.
AscentResult projected_ascent(const ConcaveObjective& objective, const ComplexMatrix& start,
                              const MinimaxOptions& opts);

/// F(rho) = min_x f(x, rho) for a fixed (regularized) POVM and observable.
class StateObjective {
 public:
  StateObjective(const Povm& povm, const HermitianOperator& obs);

  struct Evaluation {
    double value = 0.0;
    double mean = 0.0;  // Tr(O rho)
    RealVector p;
    RealVector x;       // inner minimizer x*(rho)
  };

  Evaluation evaluate(const ComplexMatrix& rho) const;
  ComplexMatrix gradient(const Evaluation& e) const;
  /// Hessian of F in basis coordinates r_k = <B_k, rho>:
  ///   2 (U M^-1 U - V) - 2 o o^T,  M = R^T P^-1 R, U = R^T X P^-1 R, V = R^T X^2 P^-1 R.
  /// Negative semidefinite.
  RealMatrix coord_hessian(const Evaluation& e) const;
  ConcaveObjective as_objective() const;

  const Povm& povm() const { return *povm_; }
  const HermitianOperator& observable() const { return *obs_; }
  const ObservableCoeffs& coeffs() const { return o_; }

 private:
  const Povm* povm_;
  const HermitianOperator* obs_;
  ObservableCoeffs o_;
};

/// Continues an ascent run with projected Newton steps: each step maximizes
/// the local quadratic model over the spectrahedron (accelerated projected
/// gradient), then backtracks along the segment to the model optimum.
/// Monotone like projected_ascent.
AscentResult polish_ascent(const StateObjective& objective, const AscentResult& from,
                           const MinimaxOptions& opts);

/// f(x, .) for fixed coefficients: Tr(A rho) - Tr(M rho)^2 with
/// A = sum_j x_j^2 E_j and M = sum_j x_j E_j (M = O for feasible x).
ConcaveObjective fixed_coefficient_objective(std::span<const double> x, const Povm& povm);

/// f(x, rho) evaluated from the state's outcome distribution.
double estimator_variance(std::span<const double> x, const Povm& povm, const DensityMatrix& rho);

/// Euclidean gradient of F at rho. The POVM must already give p_j > 0.
HermitianOperator envelope_gradient(const DensityMatrix& rho, const Povm& povm,
                                    const HermitianOperator& obs);

struct MinimaxReport {
  double optimal_value = 0.0;
  std::optional<CoefficientVector> x_star;
  std::optional<DensityMatrix> rho_star;
  int rho_rank = 0;
  double duality_gap = 0.0;
  double canonical_worst_case = 0.0;
  double spread_bound = 0.0;
  std::vector<int> iterations_per_restart;
  double wall_time = 0.0;
  bool converged = false;
  double projected_gradient_norm = 0.0;
  int best_restart = 0;
  int polish_iterations = 0;
};

/// Solves max_rho F(rho) with restarts (maximally mixed start plus
/// restarts - 1 random full-rank states), then fills in the canonical worst
/// case, the spectral lower bound and the duality gap at (x*, rho*).
/// Non-convergence is reported through MinimaxReport::converged.
MinimaxReport maximize_over_states(const Povm& povm, const HermitianOperator& obs,
                                   const MinimaxOptions& opts);

struct WorstCase {
  double value = 0.0;
  ComplexMatrix rho;
  bool converged = false;
};

/// max_rho f(x_MP, rho) for the canonical coefficients of the regularized POVM.
WorstCase canonical_worst_case(const Povm& povm, const HermitianOperator& obs,
                               const MinimaxOptions& opts);
/// max_rho f(x, rho) for arbitrary fixed coefficients on the given POVM (not regularized).
/// Starts from the maximally mixed state, opts.restarts - 1 random states and
/// any extra starts; returns the best.
WorstCase worst_case_for_coefficients(std::span<const double> x, const Povm& povm,
                                      const MinimaxOptions& opts,
                                      const std::vector<ComplexMatrix>& extra_starts = {});

/// [max_rho' f(x, rho')] - [min_x' f(x', rho)] on the given POVM. Zero at a saddle point.
double saddle_certificate(std::span<const double> x, const DensityMatrix& rho, const Povm& povm,
                          const HermitianOperator& obs, const MinimaxOptions& opts = {});

/// (lambda_max - lambda_min)^2 / 4, the largest variance of O itself over states.
double spread_bound(const HermitianOperator& obs);

struct ProbeStats {
  int trials = 0;
  int violations = 0;
  double max_violation = 0.0;
};

/// Checks f(x, l r1 + (1-l) r2) >= l f(x, r1) + (1-l) f(x, r2) - slack on
/// random state pairs.
ProbeStats concavity_probe(std::span<const double> x, const Povm& povm, int trials,
                           std::uint64_t seed, double slack = 1e-10);
/// Checks f(l x + (1-l) y, rho) <= l f(x, rho) + (1-l) f(y, rho) + slack on
/// random feasible pairs x, y (canonical vector plus null-space perturbations).
ProbeStats convexity_probe(const Povm& povm, const HermitianOperator& obs, int trials,
                           std::uint64_t seed, double slack = 1e-10);

/// Orthonormal basis of {v : R^T v = 0} as columns.
RealMatrix coefficient_null_space(const Povm& povm);

}  // namespace shadowmm
