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

// Monte-Carlo layer: multinomial outcome sampling, the linear estimator,
// median of means and Hoeffding sample sizes.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shadowmm/frame.hpp"
#include "shadowmm/rng.hpp"

namespace shadowmm {

struct OutcomeCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

struct SampleSizeQuery {
  double sigma_sq = 1.0;
  double epsilon = 0.1;
  double delta = 0.05;
  std::uint64_t m_observables = 1;

  /// Throws InvalidArgument.
  void validate() const;
};

/// Draws K outcomes by inverse CDF, one uniform per shot.
OutcomeCounts sample_outcomes(const ProbabilityVector& p, std::uint64_t shots, CounterRng& rng);
OutcomeCounts sample_outcomes(const DensityMatrix& rho, const Povm& povm, std::uint64_t shots,
                              std::uint64_t seed);

/// sum_j (k_j / K) x_j.
double estimate(const OutcomeCounts& counts, std::span<const double> x);
double estimate(const OutcomeCounts& counts, const CoefficientVector& x);

/// Median over `batches` equal batches of the batch estimates. batches must be
/// odd and divide k_total.
double median_of_means(const DensityMatrix& rho, const Povm& povm, std::span<const double> x,
                       std::uint64_t k_total, int batches, std::uint64_t seed);

/// ceil((2 sigma^2 / eps^2) ln(2M / delta)), at least 1.
std::uint64_t hoeffding_sample_size(const SampleSizeQuery& q);

struct CoverageResult {
  int trials = 0;
  int covered = 0;
  double rate() const { return trials > 0 ? static_cast<double>(covered) / trials : 0.0; }
};

/// Fraction of trials (each with K shots, stream (seed, trial)) whose estimate
/// lies within epsilon of sum_j p_j x_j.
CoverageResult coverage_test(const DensityMatrix& rho, const Povm& povm, std::span<const double> x,
                             double epsilon, int trials, std::uint64_t shots, std::uint64_t seed);

struct SingleShotStats {
  double variance = 0.0;
  /// Standard error of the variance estimate, sqrt((m4 - s^4) / K).
  double standard_error = 0.0;
  double mean = 0.0;
};

/// Empirical variance of the single-shot estimator value x_j over K shots.
SingleShotStats single_shot_variance(const DensityMatrix& rho, const Povm& povm,
                                     std::span<const double> x, std::uint64_t shots,
                                     std::uint64_t seed);

}  // namespace shadowmm
