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

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation and, where the CPU supports it, an AVX2/FMA variant. The
// variant is chosen once at startup; tests pin either table explicitly and
// check them against each other.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace shadowmm::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct Table {
  Isa isa;

  // sum_i a_i b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out_i = w_i * a_i
  void (*hadamard)(const double* w, const double* a, double* out, std::size_t n);

  // Pairwise (cascade) sums. Error grows like O(log n) instead of O(n).
  double (*pairwise_sum)(const double* x, std::size_t n);
  // sum_i w_i x_i
  double (*weighted_sum)(const double* w, const double* x, std::size_t n);
  // sum_i w_i x_i^2
  double (*weighted_sq_sum)(const double* w, const double* x, std::size_t n);

  // sum_i conj(a_i) b_i over interleaved complex data
  std::complex<double> (*cdot)(const std::complex<double>* a, const std::complex<double>* b,
                               std::size_t n);
  // y += alpha * x, alpha real
  void (*caxpy)(double alpha, const std::complex<double>* x, std::complex<double>* y,
                std::size_t n);

  // Q = R^T diag(w) R for column-major R (rows x cols, leading dimension rows).
  // Q is cols x cols column-major; both triangles are written.
  void (*weighted_gram)(const double* r, std::size_t rows, std::size_t cols, const double* w,
                        double* q);
};

const Table& scalar_table();
/// Throws std::runtime_error when the running CPU lacks AVX2+FMA.
const Table& avx2_table();

bool isa_available(Isa isa);

/// Table used by the library. Chosen on first use; force_isa overrides it.
const Table& active();
void force_isa(Isa isa);
Isa active_isa();

}  // namespace shadowmm::kernels
