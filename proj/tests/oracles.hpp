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

// Reference computations used by the tests. Nothing here calls into the
// library; everything is plain Eigen so the two can disagree.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace oracle {

using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

CMat pauli_i();
CMat pauli_x();
CMat pauli_z();
CMat kron(const CMat& a, const CMat& b);

/// Effects {(I+X)/4, (I-X)/4, (I+Z)/4, (I-Z)/4}.
std::vector<CMat> xz_effects();
std::vector<CMat> tensor_power(const std::vector<CMat>& effects, int n);
/// (1 - eps) E_j + (eps / n) I.
std::vector<CMat> regularize(const std::vector<CMat>& effects, double eps);

/// Coefficients of each effect in an orthonormal Hermitian basis, n x D.
RMat coefficients(const std::vector<CMat>& effects, const std::vector<CMat>& basis);
std::vector<double> born(const CMat& rho, const std::vector<CMat>& effects);

/// argmin sum_j p_j x_j^2 subject to R^T x = o, through an SVD null space of R^T.
RVec null_space_qp(const RMat& r, const RVec& o, const RVec& p);
double variance(const RVec& x, const RVec& p);

/// Euclidean projection onto the probability simplex by bisection on the shift.
RVec simplex_by_bisection(const RVec& v);
/// Frobenius projection onto density matrices by bisection on the eigenvalue shift.
CMat density_by_bisection(const CMat& m);

/// max_rho Tr(A rho) - Tr(M rho)^2 = min_t [t^2 + lambda_max(A - 2 t M)], golden section in t.
double fixed_worst_case(const CMat& a, const CMat& m);
/// Same value with A = sum x_j^2 E_j and M = sum x_j E_j.
double fixed_worst_case(const RVec& x, const std::vector<CMat>& effects);

/// Central difference of f along d.
double directional_fd(const std::function<double(const CMat&)>& f, const CMat& at, const CMat& d,
                      double h = 1e-5);

/// Bloch-ball states on a polar grid with the given resolution (n_r radii, n_a angles per axis).
std::vector<CMat> bloch_grid(int n_r, int n_a);

/// Single-qubit brute force over the one-dimensional family x0 + s v of feasible
/// coefficients (R^T v = 0): grid of `points` values of s in [-span, span], then
/// golden-section refinement around the best grid cell.
struct BruteForce {
  double value = 0.0;
  double s = 0.0;
};
BruteForce single_qubit_min_max(const RVec& x0, const RVec& v, const std::vector<CMat>& effects,
                                double span, int points = 10000);

}  // namespace oracle
