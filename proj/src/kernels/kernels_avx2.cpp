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

// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include <vector>

#include "shadowmm/kernels.hpp"

namespace shadowmm::kernels {
namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kPairwiseBlock = 32;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + kLanes), _mm256_loadu_pd(b + i + kLanes), acc1);
  }
  for (; i + kLanes <= n; i += kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void hadamard(const double* w, const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i)));
  }
  for (; i < n; ++i) out[i] = w[i] * a[i];
}

// Leaf of the cascade: lane-parallel partial sums, reduced at the end.
template <class Load, class Tail>
double leaf(std::size_t lo, std::size_t hi, const Load& load, const Tail& tail) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = lo;
  for (; i + kLanes <= hi; i += kLanes) acc = _mm256_add_pd(acc, load(i));
  double s = hsum(acc);
  for (; i < hi; ++i) s += tail(i);
  return s;
}

template <class Load, class Tail>
double cascade(std::size_t lo, std::size_t hi, const Load& load, const Tail& tail) {
  if (hi - lo <= kPairwiseBlock) return leaf(lo, hi, load, tail);
  const std::size_t mid = lo + (hi - lo) / 2;
  return cascade(lo, mid, load, tail) + cascade(mid, hi, load, tail);
}

double pairwise_sum(const double* x, std::size_t n) {
  return cascade(
      0, n, [x](std::size_t i) { return _mm256_loadu_pd(x + i); },
      [x](std::size_t i) { return x[i]; });
}

double weighted_sum(const double* w, const double* x, std::size_t n) {
  return cascade(
      0, n,
      [w, x](std::size_t i) { return _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i)); },
      [w, x](std::size_t i) { return w[i] * x[i]; });
}

double weighted_sq_sum(const double* w, const double* x, std::size_t n) {
  return cascade(
      0, n,
      [w, x](std::size_t i) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        return _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(xv, xv));
      },
      [w, x](std::size_t i) { return w[i] * x[i] * x[i]; });
}

// Interleaved (re, im) pairs: two complex numbers per register.
std::complex<double> cdot(const std::complex<double>* a, const std::complex<double>* b,
                          std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();  // lanes: ar*br, ai*bi
  __m256d acc_im = _mm256_setzero_pd();  // lanes: ar*bi, ai*br
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), acc_im);
  }
  alignas(32) double re[4];
  alignas(32) double im[4];
  _mm256_store_pd(re, acc_re);
  _mm256_store_pd(im, acc_im);
  double sre = (re[0] + re[2]) + (re[1] + re[3]);
  double sim = (im[0] + im[2]) - (im[1] + im[3]);
  for (; i < n; ++i) {
    sre += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    sim += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {sre, sim};
}

void caxpy(double alpha, const std::complex<double>* x, std::complex<double>* y, std::size_t n) {
  axpy(alpha, reinterpret_cast<const double*>(x), reinterpret_cast<double*>(y), 2 * n);
}

// One weighted column against four plain columns per pass, so the weighted
// column is loaded once for four FMAs.
void dot_1x4(const double* b, const double* a0, const double* a1, const double* a2,
             const double* a3, std::size_t n, double* out) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d vb = _mm256_loadu_pd(b + i);
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + i), vb, s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + i), vb, s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + i), vb, s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + i), vb, s3);
  }
  out[0] = hsum(s0);
  out[1] = hsum(s1);
  out[2] = hsum(s2);
  out[3] = hsum(s3);
  for (; i < n; ++i) {
    out[0] += a0[i] * b[i];
    out[1] += a1[i] * b[i];
    out[2] += a2[i] * b[i];
    out[3] += a3[i] * b[i];
  }
}

void weighted_gram(const double* r, std::size_t rows, std::size_t cols, const double* w,
                   double* q) {
  std::vector<double> wl(rows);
  for (std::size_t l = 0; l < cols; ++l) {
    const double* rl = r + l * rows;
    hadamard(w, rl, wl.data(), rows);
    std::size_t k = 0;
    double out[4];
    for (; k + 4 <= l + 1; k += 4) {
      dot_1x4(wl.data(), r + k * rows, r + (k + 1) * rows, r + (k + 2) * rows, r + (k + 3) * rows,
              rows, out);
      for (std::size_t t = 0; t < 4; ++t) {
        q[(k + t) + l * cols] = out[t];
        q[l + (k + t) * cols] = out[t];
      }
    }
    for (; k <= l; ++k) {
      const double s = dot(r + k * rows, wl.data(), rows);
      q[k + l * cols] = s;
      q[l + k * cols] = s;
    }
  }
}

}  // namespace

const Table& avx2_table_unchecked() {
  static const Table table{Isa::kAvx2,  dot,          axpy,          hadamard,
                           pairwise_sum, weighted_sum, weighted_sq_sum, cdot,
                           caxpy,        weighted_gram};
  return table;
}

}  // namespace shadowmm::kernels
