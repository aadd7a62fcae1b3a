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

#include "shadowmm/minimax.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "shadowmm/error.hpp"
#include "shadowmm/kernels.hpp"
#include "shadowmm/random.hpp"

namespace shadowmm {
namespace {

constexpr int kMaxBacktracks = 80;
constexpr double kMaxMove = 1e3;

double re_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return kernels::active().cdot(a.data(), b.data(), static_cast<std::size_t>(a.size())).real();
}

double stationarity(const ComplexMatrix& rho, const ComplexMatrix& grad, double value) {
  const double scale = std::max(1.0, std::abs(value));
  return (project_to_density(rho + grad / scale) - rho).norm();
}

RealVector basis_coords(const OperatorBasis& basis, const ComplexMatrix& m) {
  const auto& k = kernels::active();
  RealVector c(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    c[i] = k.cdot(basis[i].matrix().data(), m.data(), static_cast<std::size_t>(m.size())).real();
  }
  return c;
}

void add_combination(const OperatorBasis& basis, const RealVector& c, ComplexMatrix& out) {
  const auto& k = kernels::active();
  for (int i = 0; i < basis.size(); ++i) {
    k.caxpy(c[i], basis[i].matrix().data(), out.data(), static_cast<std::size_t>(out.size()));
  }
}

RealMatrix weighted_gram(const RealMatrix& r, const RealVector& w) {
  RealMatrix q(r.cols(), r.cols());
  kernels::active().weighted_gram(r.data(), static_cast<std::size_t>(r.rows()),
                                  static_cast<std::size_t>(r.cols()), w.data(), q.data());
  return q;
}

// Maximizes <G, s - rho> + 1/2 c^T H c, c = coords(s - rho), over density
// matrices s by accelerated projected gradient with gradient restarts.
ComplexMatrix maximize_quadratic_model(const OperatorBasis& basis, const ComplexMatrix& rho,
                                       const ComplexMatrix& grad, const RealMatrix& hess,
                                       double lipschitz, int max_iters) {
  ComplexMatrix s = rho;
  ComplexMatrix y = rho;
  double t = 1.0;
  for (int k = 0; k < max_iters; ++k) {
    ComplexMatrix g = grad;
    add_combination(basis, hess * basis_coords(basis, y - rho), g);
    ComplexMatrix next = project_to_density(y + g / lipschitz);
    const ComplexMatrix move = next - s;
    const double moved = move.norm();
    const double travelled = (next - rho).norm();
    if (re_inner(next - y, move) < 0) {
      t = 1.0;
      y = next;
    } else {
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = next + ((t - 1.0) / tn) * move;
      t = tn;
    }
    s = std::move(next);
    if (moved <= 1e-10 * travelled || travelled == 0.0) break;
  }
  return s;
}

std::span<const double> as_span(const RealVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Results are
// written by index, so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(int count, int threads, const Fn& fn) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<ComplexMatrix> restart_points(int dim, const MinimaxOptions& opts) {
  std::vector<ComplexMatrix> starts;
  starts.push_back(DensityMatrix::maximally_mixed(dim).matrix());
  for (int r = 1; r < opts.restarts; ++r) {
    CounterRng rng(opts.seed, static_cast<std::uint64_t>(r));
    starts.push_back(random::density(dim, rng).matrix());
  }
  return starts;
}

struct Best {
  int index = -1;
  double value = -std::numeric_limits<double>::infinity();
};

// Highest value wins; ties go to the lowest index.
Best pick_best(const std::vector<AscentResult>& runs) {
  Best best;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].value > best.value) {
      best.value = runs[i].value;
      best.index = static_cast<int>(i);
    }
  }
  return best;
}

WorstCase worst_case_impl(std::span<const double> x, const Povm& povm, const MinimaxOptions& opts,
                          const std::vector<ComplexMatrix>& starts) {
  const ConcaveObjective obj = fixed_coefficient_objective(x, povm);
  std::vector<AscentResult> runs(starts.size());
  parallel_for(static_cast<int>(starts.size()), opts.threads,
               [&](int i) { runs[static_cast<std::size_t>(i)] = projected_ascent(obj, starts[static_cast<std::size_t>(i)], opts); });
  const Best best = pick_best(runs);
  const auto& r = runs[static_cast<std::size_t>(best.index)];
  return {r.value, r.rho, r.converged};
}

}  // namespace

void MinimaxOptions::validate() const {
  if (max_iters < 1) throw ConfigError("minimax.max_iters must be >= 1");
  if (!(grad_tol > 0)) throw ConfigError("minimax.grad_tol must be > 0");
  if (!(value_tol > 0)) throw ConfigError("minimax.value_tol must be > 0");
  if (value_window < 1) throw ConfigError("minimax.value_window must be >= 1");
  if (restarts < 1) throw ConfigError("minimax.restarts must be >= 1");
  if (!(eps_regularization >= 0 && eps_regularization < 1)) {
    throw ConfigError("minimax.eps_regularization must lie in [0, 1)");
  }
  if (!(backtrack_beta > 0 && backtrack_beta < 1)) throw ConfigError("minimax.backtrack_beta must lie in (0, 1)");
  if (!(armijo_c > 0 && armijo_c < 1)) throw ConfigError("minimax.armijo_c must lie in (0, 1)");
  if (threads < 1) throw ConfigError("minimax.threads must be >= 1");
  if (polish_iters < 0) throw ConfigError("minimax.polish_iters must be >= 0");
}

// ---------------------------------------------------------------------------
// Projections

RealVector project_to_simplex(const RealVector& v) {
  const long n = v.size();
  if (n == 0) return v;
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (long j = 0; j < n; ++j) {
    cumsum += u[static_cast<std::size_t>(j)];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

ComplexMatrix project_to_density(const ComplexMatrix& m) {
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  RealVector lam = project_to_simplex(es.eigenvalues());
  lam /= lam.sum();
  const ComplexMatrix& v = es.eigenvectors();
  ComplexMatrix out = v * lam.asDiagonal() * v.adjoint();
  return 0.5 * (out + out.adjoint());
}

// ---------------------------------------------------------------------------
// Ascent driver

AscentResult projected_ascent(const ConcaveObjective& objective, const ComplexMatrix& start,
                              const MinimaxOptions& opts) {
  opts.validate();
  AscentResult res;
  ComplexMatrix rho = start;
  ComplexMatrix grad(rho.rows(), rho.cols());
  double value = objective.value_and_gradient(rho, grad);
  res.history.push_back(value);

  ComplexMatrix prev_rho;
  ComplexMatrix prev_grad;
  bool have_prev = false;
  double step = 1.0 / std::max(grad.norm(), 1e-300);
  ComplexMatrix cand_grad(rho.rows(), rho.cols());

  for (int it = 0; it < opts.max_iters; ++it) {
    double trial = step;
    if (have_prev) {
      const ComplexMatrix s = rho - prev_rho;
      const ComplexMatrix y = grad - prev_grad;
      const double sy = re_inner(s, y);
      const double ss = s.squaredNorm();
      // Concave objective: <s, y> <= 0 along the path.
      if (sy < 0 && ss > 0) trial = ss / (-sy);
      else trial = 2.0 * step;
    }
    // The spectrahedron has diameter sqrt(2); longer moves only cost precision.
    const double gnorm = grad.norm();
    if (gnorm > 0) trial = std::min(trial, kMaxMove / gnorm);

    bool accepted = false;
    bool stalled = false;
    ComplexMatrix cand;
    double cand_value = 0.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      cand = project_to_density(rho + trial * grad);
      const ComplexMatrix delta = cand - rho;
      if (delta.norm() <= 1e-15) {
        stalled = true;
        break;
      }
      const double ascent = re_inner(grad, delta);
      try {
        cand_value = objective.value_and_gradient(cand, cand_grad);
      } catch (const Error&) {
        cand_value = -std::numeric_limits<double>::infinity();
      }
      if (cand_value >= value + opts.armijo_c * ascent && cand_value >= value) {
        accepted = true;
        break;
      }
      trial *= opts.backtrack_beta;
    }

    if (!accepted) {
      // No admissible step: rho is (numerically) a fixed point of the projection.
      res.projected_gradient_norm = stationarity(rho, grad, value);
      res.converged = stalled || res.projected_gradient_norm <= opts.grad_tol;
      break;
    }

    prev_rho = std::move(rho);
    prev_grad = grad;
    have_prev = true;
    rho = std::move(cand);
    grad.swap(cand_grad);
    value = cand_value;
    step = trial;
    res.iterations = it + 1;
    res.history.push_back(value);

    res.projected_gradient_norm = stationarity(rho, grad, value);
    if (res.projected_gradient_norm <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    const auto h = res.history.size();
    if (h > static_cast<std::size_t>(opts.value_window)) {
      const double old = res.history[h - 1 - static_cast<std::size_t>(opts.value_window)];
      if (std::abs(value - old) <= opts.value_tol * std::max(1.0, std::abs(value))) {
        res.converged = true;
        break;
      }
    }
  }
  res.rho = std::move(rho);
  res.value = value;
  return res;
}

AscentResult polish_ascent(const StateObjective& objective, const AscentResult& from,
                           const MinimaxOptions& opts) {
  constexpr int kModelIters = 5000;
  AscentResult res = from;
  if (opts.polish_iters == 0) return res;
  const OperatorBasis& basis = objective.povm().basis();
  ComplexMatrix rho = from.rho;
  StateObjective::Evaluation e = objective.evaluate(rho);
  double value = e.value;
  ComplexMatrix grad = objective.gradient(e);

  for (int it = 0; it < opts.polish_iters; ++it) {
    const RealMatrix hess = objective.coord_hessian(e);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(hess, Eigen::EigenvaluesOnly);
    const double lipschitz = -es.eigenvalues()(0);
    if (!(lipschitz > 1e-300)) break;  // linear model: nothing to gain over plain ascent
    const ComplexMatrix target = maximize_quadratic_model(basis, rho, grad, hess, lipschitz, kModelIters);
    const ComplexMatrix dir = target - rho;
    const double slope = re_inner(grad, dir);
    if (dir.norm() <= 1e-14 || !(slope > 0)) break;

    bool accepted = false;
    double step = 1.0;
    StateObjective::Evaluation cand_eval;
    ComplexMatrix cand;
    for (int bt = 0; bt < kMaxBacktracks && !accepted; ++bt, step *= opts.backtrack_beta) {
      cand = rho + step * dir;
      try {
        cand_eval = objective.evaluate(cand);
      } catch (const Error&) {
        continue;
      }
      accepted = cand_eval.value >= value + opts.armijo_c * step * slope && cand_eval.value >= value;
    }
    if (!accepted) break;
    const double gain = cand_eval.value - value;
    rho = 0.5 * (cand + cand.adjoint());
    e = std::move(cand_eval);
    value = e.value;
    grad = objective.gradient(e);
    res.history.push_back(value);
    ++res.iterations;
    if (gain <= 1e-15 * std::max(1.0, std::abs(value))) break;
  }
  res.rho = std::move(rho);
  res.value = value;
  res.projected_gradient_norm = stationarity(res.rho, grad, value);
  res.converged = res.converged || res.projected_gradient_norm <= opts.grad_tol;
  return res;
}

// ---------------------------------------------------------------------------
// Objectives

StateObjective::StateObjective(const Povm& povm, const HermitianOperator& obs)
    : povm_(&povm), obs_(&obs), o_(observable_coeffs(obs, povm.basis())) {}

StateObjective::Evaluation StateObjective::evaluate(const ComplexMatrix& rho) const {
  const RealVector r = basis_coords(povm_->basis(), rho);
  Evaluation e;
  e.p = povm_->coeff_matrix() * r;
  e.x = optimal_coefficients_for_weights(*povm_, o_.values, as_span(e.p));
  e.mean = o_.values.dot(r);
  e.value = variance(as_span(e.x), as_span(e.p));
  return e;
}

ComplexMatrix StateObjective::gradient(const Evaluation& e) const {
  const RealVector sq = e.x.cwiseProduct(e.x);
  const RealVector c = povm_->coeff_matrix().transpose() * sq;
  ComplexMatrix g = (-2.0 * e.mean) * obs_->matrix();
  add_combination(povm_->basis(), c, g);
  return g;
}

RealMatrix StateObjective::coord_hessian(const Evaluation& e) const {
  const RealMatrix& r = povm_->coeff_matrix();
  const RealVector w = e.p.cwiseInverse();
  const RealVector xw = e.x.cwiseProduct(w);
  const RealVector x2w = e.x.cwiseProduct(xw);
  const RealMatrix m = weighted_gram(r, w);
  const RealMatrix u = weighted_gram(r, xw);
  const RealMatrix v = weighted_gram(r, x2w);
  const RealVector& o = o_.values;
  RealMatrix h = 2.0 * (u * m.llt().solve(u) - v) - 2.0 * o * o.transpose();
  return 0.5 * (h + h.transpose());
}

ConcaveObjective StateObjective::as_objective() const {
  ConcaveObjective obj;
  obj.value = [this](const ComplexMatrix& rho) { return evaluate(rho).value; };
  obj.value_and_gradient = [this](const ComplexMatrix& rho, ComplexMatrix& g) {
    const Evaluation e = evaluate(rho);
    g = gradient(e);
    return e.value;
  };
  return obj;
}

ConcaveObjective fixed_coefficient_objective(std::span<const double> x, const Povm& povm) {
  auto a = std::make_shared<const ComplexMatrix>(second_moment_operator(x, povm).matrix());
  ComplexMatrix mean_op = ComplexMatrix::Zero(povm.dim(), povm.dim());
  for (int j = 0; j < povm.size(); ++j) mean_op += x[static_cast<std::size_t>(j)] * povm.effect(j).matrix();
  auto m = std::make_shared<const ComplexMatrix>(std::move(mean_op));
  ConcaveObjective obj;
  obj.value = [a, m](const ComplexMatrix& rho) {
    const double mean = re_inner(*m, rho);
    return re_inner(*a, rho) - mean * mean;
  };
  obj.value_and_gradient = [a, m](const ComplexMatrix& rho, ComplexMatrix& g) {
    const double mean = re_inner(*m, rho);
    g = *a - (2.0 * mean) * *m;
    return re_inner(*a, rho) - mean * mean;
  };
  return obj;
}

double estimator_variance(std::span<const double> x, const Povm& povm, const DensityMatrix& rho) {
  const ProbabilityVector p = probabilities(rho, povm);
  return variance(x, as_span(p.values()));
}

HermitianOperator envelope_gradient(const DensityMatrix& rho, const Povm& povm,
                                    const HermitianOperator& obs) {
  const StateObjective so(povm, obs);
  return HermitianOperator::from_matrix(so.gradient(so.evaluate(rho.matrix())));
}

// ---------------------------------------------------------------------------
// Worst cases and certificates

WorstCase worst_case_for_coefficients(std::span<const double> x, const Povm& povm,
                                      const MinimaxOptions& opts,
                                      const std::vector<ComplexMatrix>& extra_starts) {
  std::vector<ComplexMatrix> starts = restart_points(povm.dim(), opts);
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());
  return worst_case_impl(x, povm, opts, starts);
}

namespace {

WorstCase canonical_worst_case_regularized(const Povm& reg, const ObservableCoeffs& o,
                                           const MinimaxOptions& opts) {
  const CoefficientVector x = canonical_coefficients(reg, o);
  return worst_case_for_coefficients(as_span(x.values()), reg, opts);
}

}  // namespace

WorstCase canonical_worst_case(const Povm& povm, const HermitianOperator& obs,
                               const MinimaxOptions& opts) {
  opts.validate();
  const Povm reg = regularize_povm(povm, opts.eps_regularization);
  return canonical_worst_case_regularized(reg, observable_coeffs(obs, reg.basis()), opts);
}

double saddle_certificate(std::span<const double> x, const DensityMatrix& rho, const Povm& povm,
                          const HermitianOperator& obs, const MinimaxOptions& opts) {
  // The adversary's side starts from rho itself and the maximally mixed state.
  MinimaxOptions inner = opts;
  inner.restarts = 1;
  const WorstCase adversary = worst_case_for_coefficients(x, povm, inner, {rho.matrix()});
  const StateObjective so(povm, obs);
  const double inner_min = so.evaluate(rho.matrix()).value;
  return adversary.value - inner_min;
}

double spread_bound(const HermitianOperator& obs) {
  const RealVector ev = obs.eigenvalues();
  const double spread = ev(ev.size() - 1) - ev(0);
  return 0.25 * spread * spread;
}

MinimaxReport maximize_over_states(const Povm& povm, const HermitianOperator& obs,
                                   const MinimaxOptions& opts) {
  opts.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Povm reg = regularize_povm(povm, opts.eps_regularization);
  const StateObjective so(reg, obs);
  const ConcaveObjective obj = so.as_objective();

  const std::vector<ComplexMatrix> starts = restart_points(reg.dim(), opts);
  std::vector<AscentResult> runs(starts.size());
  parallel_for(static_cast<int>(starts.size()), opts.threads, [&](int i) {
    runs[static_cast<std::size_t>(i)] = projected_ascent(obj, starts[static_cast<std::size_t>(i)], opts);
  });
  const Best best = pick_best(runs);
  const AscentResult& raw = runs[static_cast<std::size_t>(best.index)];
  const AscentResult win = polish_ascent(so, raw, opts);

  MinimaxReport rep;
  for (const auto& r : runs) rep.iterations_per_restart.push_back(r.iterations);
  rep.polish_iterations = win.iterations - raw.iterations;
  rep.best_restart = best.index;
  rep.converged = win.converged;
  rep.projected_gradient_norm = win.projected_gradient_norm;

  const auto rho_star = DensityMatrix::from_operator(HermitianOperator::from_matrix(win.rho), 1e-9);
  const auto e = so.evaluate(rho_star.matrix());
  rep.optimal_value = e.value;
  rep.x_star = CoefficientVector::create(e.x, reg, so.coeffs());
  rep.rho_rank = numerical_rank(rho_star.op(), 1e-8);

  const WorstCase canon = canonical_worst_case_regularized(reg, so.coeffs(), opts);
  rep.canonical_worst_case = canon.value;
  rep.converged = rep.converged && canon.converged;
  rep.spread_bound = spread_bound(obs);
  rep.duality_gap = saddle_certificate(as_span(rep.x_star->values()), rho_star, reg, obs, opts);
  rep.rho_star = rho_star;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Probes

RealMatrix coefficient_null_space(const Povm& povm) {
  const RealMatrix& r = povm.coeff_matrix();
  const long n = r.rows();
  const long dd = r.cols();
  if (n == dd) return RealMatrix(n, 0);
  Eigen::HouseholderQR<RealMatrix> qr(r);
  const RealMatrix q = qr.householderQ() * RealMatrix::Identity(n, n);
  return q.rightCols(n - dd);
}

ProbeStats concavity_probe(std::span<const double> x, const Povm& povm, int trials,
                           std::uint64_t seed, double slack) {
  ProbeStats st;
  const ConcaveObjective f = fixed_coefficient_objective(x, povm);
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    const ComplexMatrix r1 = random::density(povm.dim(), rng).matrix();
    const ComplexMatrix r2 = random::density(povm.dim(), rng, 1).matrix();
    const double lam = rng.uniform();
    const double lhs = f.value(lam * r1 + (1.0 - lam) * r2);
    const double rhs = lam * f.value(r1) + (1.0 - lam) * f.value(r2);
    const double v = rhs - lhs;
    ++st.trials;
    if (v > slack) ++st.violations;
    st.max_violation = std::max(st.max_violation, v);
  }
  return st;
}

ProbeStats convexity_probe(const Povm& povm, const HermitianOperator& obs, int trials,
                           std::uint64_t seed, double slack) {
  ProbeStats st;
  const ObservableCoeffs o = observable_coeffs(obs, povm.basis());
  const RealVector base = canonical_coefficients(povm, o).values();
  const RealMatrix null = coefficient_null_space(povm);
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    RealVector zx(null.cols());
    RealVector zy(null.cols());
    for (long i = 0; i < null.cols(); ++i) zx[i] = 3.0 * rng.normal();
    for (long i = 0; i < null.cols(); ++i) zy[i] = 3.0 * rng.normal();
    const RealVector x = base + null * zx;
    const RealVector y = base + null * zy;
    const DensityMatrix rho = random::density(povm.dim(), rng);
    const ProbabilityVector p = probabilities(rho, povm);
    const double lam = rng.uniform();
    const RealVector mix = lam * x + (1.0 - lam) * y;
    const double lhs = variance(as_span(mix), as_span(p.values()));
    const double rhs = lam * variance(as_span(x), as_span(p.values())) +
                       (1.0 - lam) * variance(as_span(y), as_span(p.values()));
    const double v = lhs - rhs;
    ++st.trials;
    if (v > slack) ++st.violations;
    st.max_violation = std::max(st.max_violation, v);
  }
  return st;
}

}  // namespace shadowmm
