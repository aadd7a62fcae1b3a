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

// Random operators and states, used for restarts and property tests.

#pragma once

#include "shadowmm/operator.hpp"
#include "shadowmm/rng.hpp"

namespace shadowmm::random {

/// Entries with i.i.d. standard complex Gaussian real and imaginary parts,
/// Hermitian-symmetrized.
HermitianOperator hermitian(int dim, CounterRng& rng);
/// Random Hermitian with zero trace and unit HS norm.
HermitianOperator traceless_direction(int dim, CounterRng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix haar_unitary(int dim, CounterRng& rng);
ComplexVector pure_state_vector(int dim, CounterRng& rng);
/// Dirichlet(alpha) weights of length n.
RealVector dirichlet(int n, double alpha, CounterRng& rng);
/// U diag(lambda) U^dagger with lambda ~ Dirichlet(1) on the first `rank`
/// eigenvalues and U Haar. rank <= 0 means full rank.
DensityMatrix density(int dim, CounterRng& rng, int rank = 0);
/// Random n-outcome POVM on C^dim. Effects are nonnegative combinations of
/// `span` random PSD seeds (all n when span <= 0), normalized by
/// S^{-1/2} G_j S^{-1/2} with S = sum_j G_j. With span < n the POVM is
/// overcomplete: D <= min(span, d^2) < n.
Povm povm(int dim, int n, CounterRng& rng, int span = 0);

}  // namespace shadowmm::random
