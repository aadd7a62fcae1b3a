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

#include "shadowmm/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "shadowmm/error.hpp"

namespace shadowmm {
namespace {

// Cumulative distribution with every entry from the last positive outcome on
// pinned to exactly 1, so u in [0, 1) can never land on a zero-probability tail.
std::vector<double> cumulative(const RealVector& p) {
  std::vector<double> cdf(static_cast<std::size_t>(p.size()));
  double acc = 0.0;
  long last = -1;
  for (long j = 0; j < p.size(); ++j) {
    acc += p[j];
    cdf[static_cast<std::size_t>(j)] = acc;
    if (p[j] > 0) last = j;
  }
  if (last < 0) throw InvalidArgument("sample_outcomes: all probabilities are zero");
  for (auto j = static_cast<std::size_t>(last); j < cdf.size(); ++j) cdf[j] = 1.0;
  return cdf;
}

OutcomeCounts draw(const std::vector<double>& cdf, std::uint64_t shots, CounterRng& rng) {
  OutcomeCounts out;
  out.counts.assign(cdf.size(), 0);
  out.total = shots;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ++out.counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  return out;
}

double expected_value(const ProbabilityVector& p, std::span<const double> x) {
  double m = 0.0;
  for (int j = 0; j < p.size(); ++j) m += p[j] * x[static_cast<std::size_t>(j)];
  return m;
}

void check_length(std::size_t n, std::size_t m) {
  if (n != m) throw DimensionMismatch("coefficient length does not match the number of outcomes");
}

}  // namespace

void SampleSizeQuery::validate() const {
  if (!(sigma_sq >= 0)) throw InvalidArgument("sigma_sq must be >= 0");
  if (!(epsilon > 0)) throw InvalidArgument("epsilon must be > 0");
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("delta must lie in (0, 1)");
  if (m_observables < 1) throw InvalidArgument("m_observables must be >= 1");
}

OutcomeCounts sample_outcomes(const ProbabilityVector& p, std::uint64_t shots, CounterRng& rng) {
  return draw(cumulative(p.values()), shots, rng);
}

OutcomeCounts sample_outcomes(const DensityMatrix& rho, const Povm& povm, std::uint64_t shots,
                              std::uint64_t seed) {
  if (shots < 1) throw InvalidArgument("sample_outcomes: need K >= 1");
  CounterRng rng(seed, 0);
  return sample_outcomes(probabilities(rho, povm), shots, rng);
}

double estimate(const OutcomeCounts& counts, std::span<const double> x) {
  check_length(counts.counts.size(), x.size());
  if (counts.total == 0) throw InvalidArgument("estimate: no shots");
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) acc += static_cast<double>(counts.counts[j]) * x[j];
  return acc / static_cast<double>(counts.total);
}

double estimate(const OutcomeCounts& counts, const CoefficientVector& x) {
  return estimate(counts, std::span<const double>(x.values().data(), static_cast<std::size_t>(x.size())));
}

double median_of_means(const DensityMatrix& rho, const Povm& povm, std::span<const double> x,
                       std::uint64_t k_total, int batches, std::uint64_t seed) {
  if (batches < 1 || batches % 2 == 0) throw InvalidArgument("median_of_means: batches must be odd and >= 1");
  if (k_total == 0 || k_total % static_cast<std::uint64_t>(batches) != 0) {
    throw InvalidArgument("median_of_means: K_total must be a positive multiple of batches");
  }
  check_length(static_cast<std::size_t>(povm.size()), x.size());
  const auto cdf = cumulative(probabilities(rho, povm).values());
  const std::uint64_t per = k_total / static_cast<std::uint64_t>(batches);
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    CounterRng rng(seed, static_cast<std::uint64_t>(b));
    means.push_back(estimate(draw(cdf, per, rng), x));
  }
  auto mid = means.begin() + batches / 2;
  std::nth_element(means.begin(), mid, means.end());
  return *mid;
}

std::uint64_t hoeffding_sample_size(const SampleSizeQuery& q) {
  q.validate();
  const double k = 2.0 * q.sigma_sq / (q.epsilon * q.epsilon) *
                   std::log(2.0 * static_cast<double>(q.m_observables) / q.delta);
  // Guard against 200*ln(40) style products landing a hair above an integer.
  const double r = std::ceil(k - 1e-9 * std::max(1.0, k));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(r));
}

CoverageResult coverage_test(const DensityMatrix& rho, const Povm& povm, std::span<const double> x,
                             double epsilon, int trials, std::uint64_t shots, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("coverage_test: need trials >= 1");
  if (shots < 1) throw InvalidArgument("coverage_test: need K >= 1");
  check_length(static_cast<std::size_t>(povm.size()), x.size());
  const ProbabilityVector p = probabilities(rho, povm);
  const auto cdf = cumulative(p.values());
  const double truth = expected_value(p, x);
  CoverageResult res;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    const double est = estimate(draw(cdf, shots, rng), x);
    ++res.trials;
    if (std::abs(est - truth) <= epsilon) ++res.covered;
  }
  return res;
}

SingleShotStats single_shot_variance(const DensityMatrix& rho, const Povm& povm,
                                     std::span<const double> x, std::uint64_t shots,
                                     std::uint64_t seed) {
  if (shots < 2) throw InvalidArgument("single_shot_variance: need K >= 2");
  check_length(static_cast<std::size_t>(povm.size()), x.size());
  const OutcomeCounts c = sample_outcomes(rho, povm, shots, seed);
  const double k = static_cast<double>(shots);
  const double mean = estimate(c, x);
  double m2 = 0.0;
  double m4 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - mean;
    const double w = static_cast<double>(c.counts[j]);
    m2 += w * d * d;
    m4 += w * d * d * d * d;
  }
  SingleShotStats st;
  st.mean = mean;
  st.variance = m2 / (k - 1.0);
  const double s4 = (m2 / k) * (m2 / k);
  st.standard_error = std::sqrt(std::max(0.0, m4 / k - s4) / k);
  return st;
}

}  // namespace shadowmm
