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
#include <numeric>

#include "shadowmm/error.hpp"
#include "shadowmm/random.hpp"
#include "shadowmm/simulator.hpp"

using namespace shadowmm;

namespace {

const RealVector kZCoeffs = (RealVector(4) << 0.0, 0.0, 2.0, -2.0).finished();

std::span<const double> sp(const RealVector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

DensityMatrix ket0() { return DensityMatrix::pure(ComplexVector::Unit(2, 0)); }

}  // namespace

TEST_CASE("sampling never produces zero-probability outcomes") {
  const Povm p = build_xz_povm();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const OutcomeCounts c = sample_outcomes(ket0(), p, 5000, seed);
    CHECK(c.counts[3] == 0);
    CHECK(c.total == 5000);
    CHECK(std::accumulate(c.counts.begin(), c.counts.end(), std::uint64_t{0}) == 5000);
  }
  CHECK_THROWS_AS(sample_outcomes(ket0(), p, 0, 1), InvalidArgument);
}

TEST_CASE("maximally mixed frequencies stay inside the binomial envelope") {
  const OutcomeCounts c = sample_outcomes(DensityMatrix::maximally_mixed(2), build_xz_povm(), 1000000, 12345);
  for (auto k : c.counts) CHECK(std::abs(static_cast<double>(k) / 1e6 - 0.25) <= 0.002);
}

TEST_CASE("sampling is deterministic given the seed") {
  CounterRng rng(3, 0);
  const DensityMatrix rho = random::density(4, rng);
  const Povm p = tensor_power(build_xz_povm(), 2);
  const OutcomeCounts a = sample_outcomes(rho, p, 1000, 77);
  const OutcomeCounts b = sample_outcomes(rho, p, 1000, 77);
  const OutcomeCounts c = sample_outcomes(rho, p, 1000, 78);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != c.counts);
}

TEST_CASE("estimate") {
  OutcomeCounts c{{0, 0, 10, 0}, 10};
  CHECK(estimate(c, sp(kZCoeffs)) == doctest::Approx(2.0));
  const RealVector ones = RealVector::Ones(4);
  CHECK(estimate(OutcomeCounts{{3, 1, 4, 1}, 9}, sp(ones)) == doctest::Approx(1.0));
  // Exact probabilities as frequencies: (1/4, 1/4, 1/2, 0) on |0>.
  const OutcomeCounts exact{{250, 250, 500, 0}, 1000};
  CHECK(estimate(exact, sp(kZCoeffs)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(estimate(OutcomeCounts{{0, 0, 0, 0}, 0}, sp(kZCoeffs)), InvalidArgument);
  CHECK_THROWS_AS(estimate(c, sp(RealVector::Ones(3))), DimensionMismatch);
}

TEST_CASE("median of means") {
  const Povm p = build_xz_povm();
  const double mom = median_of_means(ket0(), p, sp(kZCoeffs), 90000, 9, 2024);
  CHECK(std::abs(mom - 1.0) <= 0.05);

  // One batch uses stream 0 of the seed, the same stream as a plain draw.
  const double one = median_of_means(ket0(), p, sp(kZCoeffs), 500, 1, 5);
  CHECK(one == estimate(sample_outcomes(ket0(), p, 500, 5), sp(kZCoeffs)));

  const RealVector c = RealVector::Constant(4, 0.7);
  CHECK(median_of_means(DensityMatrix::maximally_mixed(2), p, sp(c), 99, 3, 1) == doctest::Approx(0.7));

  CHECK_THROWS_AS(median_of_means(ket0(), p, sp(kZCoeffs), 100, 2, 1), InvalidArgument);
  CHECK_THROWS_AS(median_of_means(ket0(), p, sp(kZCoeffs), 100, 3, 1), InvalidArgument);
  CHECK_THROWS_AS(median_of_means(ket0(), p, sp(kZCoeffs), 0, 1, 1), InvalidArgument);
}

TEST_CASE("Hoeffding sample size") {
  CHECK(hoeffding_sample_size({1.0, 0.1, 0.05, 1}) == 738);
  const auto k1 = hoeffding_sample_size({1.0, 0.1, 0.05, 10});
  const auto k2 = hoeffding_sample_size({1.0, 0.1, 0.05, 20});
  const double step = 200.0 * std::log(2.0);
  CHECK(static_cast<double>(k2 - k1) >= std::floor(step));
  CHECK(static_cast<double>(k2 - k1) <= std::ceil(step));
  CHECK(hoeffding_sample_size({0.0, 0.1, 0.05, 1}) == 1);
  CHECK(hoeffding_sample_size({2.0, 0.1, 0.05, 1}) > 738);
  CHECK(hoeffding_sample_size({1.0, 0.05, 0.05, 1}) > 738);
  CHECK_THROWS_AS(hoeffding_sample_size({1.0, 0.0, 0.05, 1}), InvalidArgument);
  CHECK_THROWS_AS(hoeffding_sample_size({1.0, 0.1, 1.0, 1}), InvalidArgument);
  CHECK_THROWS_AS(hoeffding_sample_size({-1.0, 0.1, 0.05, 1}), InvalidArgument);
  CHECK_THROWS_AS(hoeffding_sample_size({1.0, 0.1, 0.05, 0}), InvalidArgument);
}

TEST_CASE("coverage") {
  const Povm p = build_xz_povm();
  const auto huge = coverage_test(ket0(), p, sp(kZCoeffs), 1e9, 50, 10, 1);
  CHECK(huge.rate() == 1.0);
  const auto flat = coverage_test(ket0(), p, sp(RealVector::Constant(4, 3.0)), 1e-12, 50, 10, 1);
  CHECK(flat.rate() == 1.0);

  // The canonical Z estimator has worst-case single-shot variance 2.
  const auto k = hoeffding_sample_size({2.0, 0.25, 0.05, 1});
  const auto cov = coverage_test(ket0(), p, sp(kZCoeffs), 0.25, 500, k, 9);
  CHECK(cov.trials == 500);
  CHECK(cov.rate() >= 0.95);
  CHECK_THROWS_AS(coverage_test(ket0(), p, sp(kZCoeffs), 0.1, 0, 10, 1), InvalidArgument);
}

TEST_CASE("single-shot variance estimate") {
  // On |0>, x takes 0, 0, 2 with probabilities 1/4, 1/4, 1/2: variance 1.
  const SingleShotStats st = single_shot_variance(ket0(), build_xz_povm(), sp(kZCoeffs), 100000, 4);
  CHECK(std::abs(st.mean - 1.0) < 0.02);
  CHECK(std::abs(st.variance - 1.0) <= 4 * st.standard_error);
  CHECK(st.standard_error > 0.0);
  CHECK(st.standard_error < 0.01);
  CHECK_THROWS_AS(single_shot_variance(ket0(), build_xz_povm(), sp(kZCoeffs), 1, 4), InvalidArgument);
}
