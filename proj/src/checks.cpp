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

#include "shadowmm/checks.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "shadowmm/error.hpp"
#include "shadowmm/experiment.hpp"
#include "shadowmm/frame.hpp"
#include "shadowmm/kernels.hpp"
#include "shadowmm/minimax.hpp"
#include "shadowmm/random.hpp"

namespace shadowmm {
namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::span<const double> as_span(const RealVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

CheckResult inner_oracle(std::uint64_t seed) {
  double worst_value = 0.0, worst_coeff = 0.0;
  for (int t = 0; t < 50; ++t) {
    CounterRng rng(seed, 1000 + static_cast<std::uint64_t>(t));
    const int d = 2 + t % 3;
    const int n = d * d + static_cast<int>(rng() % 6);
    const Povm povm = random::povm(d, n, rng);
    const HermitianOperator obs = povm.basis().combine(povm.basis().coords(random::hermitian(d, rng)));
    const RealVector o = observable_coeffs(obs, povm.basis()).values;
    RealVector p = random::dirichlet(n, 1.0, rng);
    const RealVector a = optimal_coefficients_for_weights(povm, o, as_span(p));
    const RealVector b = qp_inner_oracle_weights(povm, o, as_span(p));
    const double va = variance(as_span(a), as_span(p)), vb = variance(as_span(b), as_span(p));
    worst_value = std::max(worst_value, std::abs(va - vb) / std::max(1.0, std::abs(vb)));
    worst_coeff = std::max(worst_coeff, (a - b).cwiseAbs().maxCoeff());
  }
  return {"inner-oracle", worst_value <= 1e-8 && worst_coeff <= 1e-6,
          fmt("max rel value diff %.2e, max coeff diff %.2e", worst_value, worst_coeff)};
}

CheckResult convexity(std::uint64_t seed) {
  const Povm xz = build_xz_povm();
  const Problem two = pauli_sum_observable(0.7, 2);
  const ProbeStats a = convexity_probe(xz, pauli::Z(), 500, seed);
  const ProbeStats b = convexity_probe(two.povm, two.obs, 500, seed + 1);
  const int v = a.violations + b.violations;
  return {"x-convexity", v == 0,
          fmt("%.0f violations in 1000 trials, max excess %.2e", v, std::max(a.max_violation, b.max_violation))};
}

CheckResult concavity(std::uint64_t seed) {
  const Povm xz = build_xz_povm();
  const RealVector x = canonical_coefficients(xz, observable_coeffs(pauli::Z(), xz.basis())).values();
  const Problem two = pauli_sum_observable(0.7, 2);
  const RealVector y = canonical_sum_coefficients(0.7, 2, two).values();
  const ProbeStats a = concavity_probe(as_span(x), xz, 500, seed);
  const ProbeStats b = concavity_probe(as_span(y), two.povm, 500, seed + 1);
  const int v = a.violations + b.violations;
  return {"rho-concavity", v == 0,
          fmt("%.0f violations in 1000 trials, max excess %.2e", v, std::max(a.max_violation, b.max_violation))};
}

CheckResult gradient_gate(std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    CounterRng rng(seed, 2000 + static_cast<std::uint64_t>(t));
    const int d = 2 + t % 2;
    const Povm povm = regularize_povm(random::povm(d, d * d + 2, rng), kDefaultRegularization);
    const HermitianOperator obs = random::hermitian(d, rng);
    const StateObjective so(povm, obs);
    const ComplexMatrix rho = random::density(d, rng).matrix();
    const ComplexMatrix g = so.gradient(so.evaluate(rho));
    for (int k = 0; k < 10; ++k) {
      const ComplexMatrix dir = random::traceless_direction(d, rng).matrix();
      const double h = 1e-5;
      const double fd = (so.evaluate(rho + h * dir).value - so.evaluate(rho - h * dir).value) / (2 * h);
      const double an = (g.adjoint() * dir).trace().real();
      worst = std::max(worst, std::abs(fd - an) / std::max(1e-3, std::abs(an)));
    }
  }
  return {"gradient-gate", worst <= 1e-5, fmt("max relative error %.2e", worst)};
}

CheckResult saddle(std::uint64_t seed) {
  MinimaxOptions opts;
  opts.seed = seed;
  double worst_gap = 0.0, worst_diff = 0.0;
  for (double theta : {0.0, 0.4, 0.9, 1.3}) {
    const Problem p = product_observable(theta, 1);
    const MinimaxReport r = maximize_over_states(p.povm, p.obs, opts);
    worst_gap = std::max(worst_gap, r.duality_gap);
    worst_diff = std::max(worst_diff, std::abs(r.optimal_value - r.canonical_worst_case));
  }
  return {"saddle-single-qubit", worst_gap <= 1e-5 && worst_diff <= 1e-5,
          fmt("max duality gap %.2e, max |optimal - canonical| %.2e", worst_gap, worst_diff)};
}

CheckResult dual_frames(std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    CounterRng rng(seed, 3000 + static_cast<std::uint64_t>(t));
    const int d = 2 + t % 2;
    const Povm povm = random::povm(d, d * d + 3, rng);
    const DualFrame frame = dual_frame(canonical_pseudo_inverse(povm), povm, DualFrameSource::kCanonical);
    const HermitianOperator a = random::hermitian(d, rng);
    ComplexMatrix back = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < povm.size(); ++j) {
      back += hs_inner(povm.effect(j), a) * frame.elements[static_cast<std::size_t>(j)].matrix();
    }
    worst = std::max(worst, (back - a.matrix()).cwiseAbs().maxCoeff());
  }
  return {"dual-frame-resolution", worst <= 1e-8, fmt("max reconstruction error %.2e", worst)};
}

CheckResult kernel_equivalence(std::uint64_t seed) {
  if (!kernels::isa_available(kernels::Isa::kAvx2)) return {"kernel-equivalence", true, "AVX2 unavailable, scalar only"};
  const auto& s = kernels::scalar_table();
  const auto& v = kernels::avx2_table();
  CounterRng rng(seed, 4000);
  const std::size_t n = 1037;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  const double ds = s.dot(a.data(), b.data(), n), dv = v.dot(a.data(), b.data(), n);
  const double diff = std::abs(ds - dv) / std::max(1.0, std::abs(ds));
  return {"kernel-equivalence", diff <= 1e-12, fmt("dot relative difference %.2e", diff)};
}

CheckResult guarded(const char* name, const std::function<CheckResult()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<CheckResult> run_self_checks(std::uint64_t seed) {
  return {
      guarded("inner-oracle", [&] { return inner_oracle(seed); }),
      guarded("x-convexity", [&] { return convexity(seed); }),
      guarded("rho-concavity", [&] { return concavity(seed); }),
      guarded("gradient-gate", [&] { return gradient_gate(seed); }),
      guarded("saddle-single-qubit", [&] { return saddle(seed); }),
      guarded("dual-frame-resolution", [&] { return dual_frames(seed); }),
      guarded("kernel-equivalence", [&] { return kernel_equivalence(seed); }),
  };
}

}  // namespace shadowmm
