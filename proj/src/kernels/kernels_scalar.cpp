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

#include "shadowmm/kernels.hpp"

namespace shadowmm::kernels {
namespace {

constexpr std::size_t kPairwiseBlock = 32;

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void hadamard(const double* w, const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * a[i];
}

// Generic cascade over an element functor.
template <class Term>
double cascade(std::size_t lo, std::size_t hi, const Term& term) {
  if (hi - lo <= kPairwiseBlock) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return cascade(lo, mid, term) + cascade(mid, hi, term);
}

double pairwise_sum(const double* x, std::size_t n) {
  return cascade(0, n, [x](std::size_t i) { return x[i]; });
}

double weighted_sum(const double* w, const double* x, std::size_t n) {
  return cascade(0, n, [w, x](std::size_t i) { return w[i] * x[i]; });
}

double weighted_sq_sum(const double* w, const double* x, std::size_t n) {
  return cascade(0, n, [w, x](std::size_t i) { return w[i] * x[i] * x[i]; });
}

std::complex<double> cdot(const std::complex<double>* a, const std::complex<double>* b,
                          std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

void caxpy(double alpha, const std::complex<double>* x, std::complex<double>* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void weighted_gram(const double* r, std::size_t rows, std::size_t cols, const double* w,
                   double* q) {
  for (std::size_t l = 0; l < cols; ++l) {
    const double* rl = r + l * rows;
    for (std::size_t k = 0; k <= l; ++k) {
      const double* rk = r + k * rows;
      double s = 0.0;
      for (std::size_t j = 0; j < rows; ++j) s += rk[j] * w[j] * rl[j];
      q[k + l * cols] = s;
      q[l + k * cols] = s;
    }
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table table{Isa::kScalar, dot,          axpy,  hadamard,     pairwise_sum,
                           weighted_sum, weighted_sq_sum, cdot, caxpy, weighted_gram};
  return table;
}

}  // namespace shadowmm::kernels
