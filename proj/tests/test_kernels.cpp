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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "shadowmm/kernels.hpp"
#include "shadowmm/rng.hpp"

using namespace shadowmm;
using cd = std::complex<double>;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t stream) {
  CounterRng rng(7, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<cd> cnormals(std::size_t n, std::uint64_t stream) {
  CounterRng rng(11, stream);
  std::vector<cd> v(n);
  for (auto& x : v) x = {rng.normal(), rng.normal()};
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Lengths hitting every tail case of 4- and 8-wide loops.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 127, 1000, 4099};

void check_against_naive(const kernels::Table& t) {
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    // Offset by one element so vector loads see unaligned addresses.
    auto a = normals(n + 1, 1), b = normals(n + 1, 2), w = normals(n + 1, 3);
    for (auto& x : w) x = std::abs(x);
    const double* pa = a.data() + 1;
    const double* pb = b.data() + 1;
    const double* pw = w.data() + 1;

    double dot = 0, sum = 0, ws = 0, wss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += pa[i] * pb[i];
      sum += pa[i];
      ws += pw[i] * pa[i];
      wss += pw[i] * pa[i] * pa[i];
    }
    CHECK(rel(t.dot(pa, pb, n), dot) < 1e-12);
    CHECK(rel(t.pairwise_sum(pa, n), sum) < 1e-12);
    CHECK(rel(t.weighted_sum(pw, pa, n), ws) < 1e-12);
    CHECK(rel(t.weighted_sq_sum(pw, pa, n), wss) < 1e-12);

    std::vector<double> y(b.begin() + 1, b.end());
    t.axpy(-0.75, pa, y.data(), n);
    std::vector<double> h(n);
    t.hadamard(pw, pa, h.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y[i] == doctest::Approx(pb[i] - 0.75 * pa[i]).epsilon(1e-14));
      CHECK(h[i] == doctest::Approx(pw[i] * pa[i]).epsilon(1e-14));
    }

    auto ca = cnormals(n + 1, 4), cb = cnormals(n + 1, 5);
    cd cdot = 0;
    for (std::size_t i = 0; i < n; ++i) cdot += std::conj(ca[i + 1]) * cb[i + 1];
    const cd got = t.cdot(ca.data() + 1, cb.data() + 1, n);
    CHECK(std::abs(got - cdot) / std::max(1.0, std::abs(cdot)) < 1e-12);

    std::vector<cd> cy(cb.begin() + 1, cb.end());
    t.caxpy(2.5, ca.data() + 1, cy.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(cy[i] - (cb[i + 1] + 2.5 * ca[i + 1])) < 1e-13);
  }
}

void check_gram(const kernels::Table& t) {
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{4, 3}, {9, 9}, {16, 9}, {37, 11}, {256, 81}}) {
    CAPTURE(rows);
    CAPTURE(cols);
    auto r = normals(rows * cols, 6 + rows);
    auto w = normals(rows, 7 + rows);
    std::vector<double> q(cols * cols, -1.0);
    t.weighted_gram(r.data(), rows, cols, w.data(), q.data());
    for (std::size_t k = 0; k < cols; ++k) {
      for (std::size_t l = 0; l < cols; ++l) {
        double ref = 0;
        for (std::size_t i = 0; i < rows; ++i) ref += r[k * rows + i] * w[i] * r[l * rows + i];
        CHECK(rel(q[l * cols + k], ref) < 1e-12);
      }
    }
  }
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") { check_against_naive(kernels::scalar_table()); }

TEST_CASE("scalar weighted gram writes both triangles") { check_gram(kernels::scalar_table()); }

TEST_CASE("avx2 kernels match naive loops and the scalar table") {
  if (!kernels::isa_available(kernels::Isa::kAvx2)) {
    MESSAGE("AVX2 not available; skipped");
    return;
  }
  const auto& v = kernels::avx2_table();
  CHECK(v.isa == kernels::Isa::kAvx2);
  check_against_naive(v);
  check_gram(v);

  const auto& s = kernels::scalar_table();
  for (std::size_t n : kLengths) {
    auto a = normals(n, 20), b = normals(n, 21);
    CHECK(rel(v.dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n)) < 1e-13);
    CHECK(rel(v.pairwise_sum(a.data(), n), s.pairwise_sum(a.data(), n)) < 1e-13);
  }
}

TEST_CASE("pairwise sum stays accurate on long ill-conditioned input") {
  // 1 followed by many copies of 1e-16: naive left-to-right summation returns 1.
  const std::size_t n = 1 << 20;
  std::vector<double> x(n, 1e-16);
  x[0] = 1.0;
  const double expected = 1.0 + (n - 1) * 1e-16;
  double naive = 0.0;
  for (double v : x) naive += v;
  REQUIRE(std::abs(naive - expected) > 1e-11);
  CHECK(std::abs(kernels::scalar_table().pairwise_sum(x.data(), n) - expected) < 1e-13);
  if (kernels::isa_available(kernels::Isa::kAvx2))
    CHECK(std::abs(kernels::avx2_table().pairwise_sum(x.data(), n) - expected) < 1e-13);
}

TEST_CASE("dispatch selects the best table and can be forced") {
  const auto initial = kernels::active_isa();
  if (kernels::isa_available(kernels::Isa::kAvx2)) CHECK(initial == kernels::Isa::kAvx2);
  else CHECK(initial == kernels::Isa::kScalar);
  kernels::force_isa(kernels::Isa::kScalar);
  CHECK(kernels::active_isa() == kernels::Isa::kScalar);
  CHECK(kernels::isa_name(kernels::active_isa()) == "scalar");
  kernels::force_isa(initial);
  CHECK(kernels::active_isa() == initial);
  if (!kernels::isa_available(kernels::Isa::kAvx2)) CHECK_THROWS(kernels::avx2_table());
}
