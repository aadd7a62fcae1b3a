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

#include "shadowmm/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "shadowmm/error.hpp"
#include "shadowmm/rng.hpp"

namespace shadowmm {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void check_qubits(int n_qubits, int max_qubits) {
  if (n_qubits < 1) throw InvalidArgument("n_qubits must be >= 1");
  if (n_qubits > max_qubits) {
    throw ResourceCap("n_qubits = " + std::to_string(n_qubits) + " exceeds the cap of " +
                      std::to_string(max_qubits) + " (4^N effects, dense storage)");
  }
}

HermitianOperator kron_power(const HermitianOperator& a, int n) {
  HermitianOperator out = a;
  for (int i = 1; i < n; ++i) out = kron(out, a);
  return out;
}

// a-index major, matching tensor_povm.
RealVector kron_vec(const RealVector& a, const RealVector& b) {
  RealVector out(a.size() * b.size());
  for (long i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

RealVector single_qubit_canonical(const HermitianOperator& obs) {
  const Povm xz = build_xz_povm();
  return canonical_coefficients(xz, observable_coeffs(obs, xz.basis())).values();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path);
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "product_observable") return ExperimentKind::kProductObservable;
  if (s == "pauli_sum") return ExperimentKind::kPauliSum;
  if (s == "single") return ExperimentKind::kSingle;
  throw ConfigError("unknown experiment '" + s + "' (expected product_observable, pauli_sum or single)");
}

template <class T>
T get_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + what + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError(std::string("unknown key '") + it.key() + "' in " + where);
    }
  }
}

MinimaxOptions parse_minimax(const json& j) {
  if (!j.is_object()) throw ConfigError("'minimax' must be an object");
  reject_unknown(j, {"max_iters", "grad_tol", "value_tol", "value_window", "restarts",
                     "eps_regularization", "backtrack_beta", "armijo_c", "polish_iters"},
                 "minimax");
  MinimaxOptions o;
  if (j.contains("max_iters")) o.max_iters = get_as<int>(j["max_iters"], "minimax.max_iters");
  if (j.contains("grad_tol")) o.grad_tol = get_as<double>(j["grad_tol"], "minimax.grad_tol");
  if (j.contains("value_tol")) o.value_tol = get_as<double>(j["value_tol"], "minimax.value_tol");
  if (j.contains("value_window")) o.value_window = get_as<int>(j["value_window"], "minimax.value_window");
  if (j.contains("restarts")) o.restarts = get_as<int>(j["restarts"], "minimax.restarts");
  if (j.contains("eps_regularization")) {
    o.eps_regularization = get_as<double>(j["eps_regularization"], "minimax.eps_regularization");
  }
  if (j.contains("backtrack_beta")) o.backtrack_beta = get_as<double>(j["backtrack_beta"], "minimax.backtrack_beta");
  if (j.contains("armijo_c")) o.armijo_c = get_as<double>(j["armijo_c"], "minimax.armijo_c");
  if (j.contains("polish_iters")) o.polish_iters = get_as<int>(j["polish_iters"], "minimax.polish_iters");
  return o;
}

struct Job {
  ExperimentKind kind;
  int n_qubits;
  double theta;
};

bool record_less(const SweepRecord& a, const SweepRecord& b) {
  if (a.experiment != b.experiment) return a.experiment < b.experiment;
  if (a.n_qubits != b.n_qubits) return a.n_qubits < b.n_qubits;
  return a.theta < b.theta;
}

SweepRecord solve_point(const Job& job, const MinimaxOptions& base, std::uint64_t job_seed,
                        const SweepOptions& sopts) {
  SweepRecord rec;
  rec.experiment = job.kind;
  rec.theta = job.theta;
  rec.n_qubits = job.n_qubits;
  try {
    const Problem prob = job.kind == ExperimentKind::kPauliSum
                             ? pauli_sum_observable(job.theta, job.n_qubits, sopts.max_qubits)
                             : product_observable(job.theta, job.n_qubits, sopts.max_qubits);
    MinimaxOptions opts = base;
    opts.seed = job_seed;
    MinimaxReport rep = maximize_over_states(prob.povm, prob.obs, opts);
    const Povm reg = regularize_povm(prob.povm, opts.eps_regularization);
    const CoefficientVector x_mp = canonical_coefficients(reg, observable_coeffs(prob.obs, reg.basis()));
    rec.optimal_value = rep.optimal_value;
    rec.canonical_value = rep.canonical_worst_case;
    rec.spread_bound = rep.spread_bound;
    rec.shadow_norm_canonical = shadow_norm_bound(x_mp, reg);
    rec.rho_rank = rep.rho_rank;
    rec.duality_gap = rep.duality_gap;
    rec.converged = rep.converged;
    if (sopts.deterministic_output) rep.wall_time = 0.0;
    rec.wall_time = rep.wall_time;
    rec.report = std::move(rep);
  } catch (const Error& e) {
    rec.converged = false;
    rec.error = e.what();
  }
  return rec;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

// ---------------------------------------------------------------------------
// Problems

ComplexVector rotated_state(double theta) {
  ComplexVector psi(2);
  psi << std::cos(theta / 2), std::sin(theta / 2);
  return psi;
}

HermitianOperator rotated_pauli(double theta) {
  return HermitianOperator::from_matrix(std::cos(theta / 2) * pauli::X().matrix() +
                                        std::sin(theta / 2) * pauli::Z().matrix());
}

Problem product_observable(double theta, int n_qubits, int max_qubits) {
  check_qubits(n_qubits, max_qubits);
  const HermitianOperator proj = DensityMatrix::pure(rotated_state(theta)).op();
  return {tensor_power(build_xz_povm(), n_qubits), kron_power(proj, n_qubits)};
}

Problem pauli_sum_observable(double theta, int n_qubits, int max_qubits) {
  check_qubits(n_qubits, max_qubits);
  const HermitianOperator sigma = rotated_pauli(theta);
  const HermitianOperator id = HermitianOperator::identity(2);
  HermitianOperator sum = HermitianOperator::zero(1 << n_qubits);
  for (int site = 0; site < n_qubits; ++site) {
    HermitianOperator term = site == 0 ? sigma : id;
    for (int k = 1; k < n_qubits; ++k) term = kron(term, k == site ? sigma : id);
    sum = sum + term;
  }
  return {tensor_power(build_xz_povm(), n_qubits), sum};
}

CoefficientVector canonical_product_coefficients(double theta, int n_qubits, const Problem& p) {
  const RealVector x1 =
      single_qubit_canonical(DensityMatrix::pure(rotated_state(theta)).op());
  RealVector x = x1;
  for (int i = 1; i < n_qubits; ++i) x = kron_vec(x, x1);
  return CoefficientVector::create(std::move(x), p.povm, observable_coeffs(p.obs, p.povm.basis()));
}

CoefficientVector canonical_product_coefficients(double theta, int n_qubits) {
  return canonical_product_coefficients(theta, n_qubits, product_observable(theta, n_qubits, n_qubits));
}

CoefficientVector canonical_sum_coefficients(double theta, int n_qubits, const Problem& p) {
  const RealVector c = single_qubit_canonical(rotated_pauli(theta));
  const RealVector ones = RealVector::Ones(c.size());
  RealVector x = RealVector::Zero(static_cast<long>(std::pow(c.size(), n_qubits)));
  for (int site = 0; site < n_qubits; ++site) {
    RealVector term = site == 0 ? c : ones;
    for (int k = 1; k < n_qubits; ++k) term = kron_vec(term, k == site ? c : ones);
    x += term;
  }
  return CoefficientVector::create(std::move(x), p.povm, observable_coeffs(p.obs, p.povm.basis()));
}

CoefficientVector canonical_sum_coefficients(double theta, int n_qubits) {
  return canonical_sum_coefficients(theta, n_qubits, pauli_sum_observable(theta, n_qubits, n_qubits));
}

// ---------------------------------------------------------------------------
// Configuration

std::string_view experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kProductObservable: return "product_observable";
    case ExperimentKind::kPauliSum: return "pauli_sum";
    case ExperimentKind::kSingle: return "single";
  }
  return "unknown";
}

std::vector<double> theta_grid_from_count(int count) {
  if (count < 1) throw ConfigError("theta_count must be >= 1");
  std::vector<double> g;
  for (int s = 1; s <= count; ++s) g.push_back(static_cast<double>(s) / count * std::numbers::pi / 2);
  return g;
}

void ExperimentConfig::validate(int max_qubits) const {
  if (theta_grid.empty()) throw ConfigError("theta_grid is empty");
  if (n_qubits.empty()) throw ConfigError("n_qubits is empty");
  for (double t : theta_grid) {
    if (!(t >= -1e-12 && t <= std::numbers::pi / 2 + 1e-12)) {
      throw ConfigError("theta values must lie in [0, pi/2]");
    }
  }
  for (int n : n_qubits) {
    if (n < 1) throw ConfigError("n_qubits entries must be >= 1");
    if (n > max_qubits) {
      throw ResourceCap("n_qubits = " + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(max_qubits) + "; use --allow-large for up to " +
                        std::to_string(kLargeMaxQubits));
    }
  }
  if (experiment == ExperimentKind::kSingle && (theta_grid.size() != 1 || n_qubits.size() != 1)) {
    throw ConfigError("experiment 'single' needs exactly one theta and one n_qubits entry");
  }
  if (outputs.csv_path.empty()) throw ConfigError("outputs.csv_path is required");
  minimax.validate();
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"experiment", "theta_grid", "n_qubits", "minimax", "seed", "outputs"}, "config");
  for (const char* key : {"experiment", "theta_grid", "n_qubits", "outputs"}) {
    if (!j.contains(key)) throw ConfigError(std::string("config is missing '") + key + "'");
  }
  ExperimentConfig c;
  c.experiment = parse_kind(get_as<std::string>(j["experiment"], "experiment"));

  const json& tg = j["theta_grid"];
  if (tg.is_array()) {
    c.theta_grid = get_as<std::vector<double>>(tg, "theta_grid");
  } else if (tg.is_object()) {
    reject_unknown(tg, {"theta_count"}, "theta_grid");
    if (!tg.contains("theta_count")) throw ConfigError("theta_grid object needs 'theta_count'");
    c.theta_grid = theta_grid_from_count(get_as<int>(tg["theta_count"], "theta_grid.theta_count"));
  } else {
    throw ConfigError("theta_grid must be an array or {\"theta_count\": k}");
  }
  c.n_qubits = get_as<std::vector<int>>(j["n_qubits"], "n_qubits");
  if (j.contains("minimax")) c.minimax = parse_minimax(j["minimax"]);
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");

  const json& out = j["outputs"];
  if (!out.is_object()) throw ConfigError("'outputs' must be an object");
  reject_unknown(out, {"csv_path", "svg_path", "report_dir"}, "outputs");
  if (!out.contains("csv_path")) throw ConfigError("outputs.csv_path is required");
  c.outputs.csv_path = get_as<std::string>(out["csv_path"], "outputs.csv_path");
  if (out.contains("svg_path") && !out["svg_path"].is_null()) {
    c.outputs.svg_path = get_as<std::string>(out["svg_path"], "outputs.svg_path");
  }
  if (out.contains("report_dir")) c.outputs.report_dir = get_as<std::string>(out["report_dir"], "outputs.report_dir");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, const SweepOptions& opts) {
  config.validate(opts.max_qubits);
  std::vector<int> ns = config.n_qubits;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<double> thetas = config.theta_grid;
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

  std::vector<Job> jobs;
  for (int n : ns) {
    for (double t : thetas) jobs.push_back({config.experiment, n, t});
  }

  const int count = static_cast<int>(jobs.size());
  const int workers = std::max(1, std::min(opts.threads, count));
  MinimaxOptions base = config.minimax;
  base.threads = std::max(1, opts.threads / workers);

  std::vector<SweepRecord> records(jobs.size());
  auto run = [&](int i) {
    CounterRng rng(config.seed, static_cast<std::uint64_t>(i));
    records[static_cast<std::size_t>(i)] = solve_point(jobs[static_cast<std::size_t>(i)], base, rng(), opts);
  };
  if (workers == 1) {
    for (int i = 0; i < count; ++i) run(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::stable_sort(records.begin(), records.end(), record_less);
  return records;
}

// ---------------------------------------------------------------------------
// Outputs

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out =
      "experiment,theta,n_qubits,optimal_value,canonical_value,spread_bound,"
      "shadow_norm_canonical,rho_rank,duality_gap,converged,wall_time_s\n";
  for (const auto& r : records) {
    out += experiment_name(r.experiment);
    out += ',' + format_number(r.theta);
    out += ',' + std::to_string(r.n_qubits);
    out += ',' + format_number(r.optimal_value);
    out += ',' + format_number(r.canonical_value);
    out += ',' + format_number(r.spread_bound);
    out += ',' + format_number(r.shadow_norm_canonical);
    out += ',' + std::to_string(r.rho_rank);
    out += ',' + format_number(r.duality_gap);
    out += ',' + bool_str(r.converged);
    out += ',' + format_number(r.wall_time);
    out += '\n';
  }
  return out;
}

std::vector<SeriesFit> fit_series(const std::vector<SweepRecord>& records) {
  std::map<std::pair<ExperimentKind, double>, std::vector<const SweepRecord*>> groups;
  for (const auto& r : records) {
    if (r.error.empty()) groups[{r.experiment, r.theta}].push_back(&r);
  }
  std::vector<SeriesFit> fits;
  for (const auto& [key, rows] : groups) {
    for (const char* series : {"optimal", "canonical"}) {
      std::vector<double> n, logn, logv;
      for (const SweepRecord* r : rows) {
        const double v = std::string_view(series) == "optimal" ? r->optimal_value : r->canonical_value;
        if (!(v > 0)) continue;
        n.push_back(r->n_qubits);
        logn.push_back(std::log(static_cast<double>(r->n_qubits)));
        logv.push_back(std::log(v));
      }
      if (n.size() < 2) continue;
      SeriesFit f;
      f.experiment = key.first;
      f.theta = key.second;
      f.series = series;
      f.exp_rate = least_squares_slope(n, logv);
      f.power_exponent = least_squares_slope(logn, logv);
      f.n_points = static_cast<int>(n.size());
      fits.push_back(std::move(f));
    }
  }
  return fits;
}

std::string fits_csv(const std::vector<SeriesFit>& fits) {
  std::string out = "experiment,theta,series,exp_rate,power_exponent,n_points\n";
  for (const auto& f : fits) {
    out += experiment_name(f.experiment);
    out += ',' + format_number(f.theta) + ',' + f.series + ',' + format_number(f.exp_rate) + ',' +
           format_number(f.power_exponent) + ',' + std::to_string(f.n_points) + '\n';
  }
  return out;
}

std::string fits_path_for(const std::string& csv_path) {
  fs::path p(csv_path);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + "_fits.csv")).string();
}

std::string sweep_svg(const std::vector<SweepRecord>& records) {
  constexpr double kW = 720, kH = 480, kLeft = 70, kRight = 170, kTop = 30, kBottom = 50;
  static constexpr std::array<const char*, 8> kColours = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::map<std::pair<ExperimentKind, double>, std::vector<const SweepRecord*>> groups;
  int nmin = 1 << 30, nmax = -1;
  double vmin = HUGE_VAL, vmax = -HUGE_VAL;
  for (const auto& r : records) {
    if (!r.error.empty()) continue;
    groups[{r.experiment, r.theta}].push_back(&r);
    nmin = std::min(nmin, r.n_qubits);
    nmax = std::max(nmax, r.n_qubits);
    for (double v : {r.optimal_value, r.canonical_value}) {
      if (v > 0) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
    }
  }
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (groups.empty() || !(vmax > 0)) {
    s << "<text x=\"" << kW / 2 << "\" y=\"" << kH / 2 << "\" text-anchor=\"middle\">no data</text>\n</svg>\n";
    return s.str();
  }
  double x0 = nmin, x1 = nmax;
  if (x0 == x1) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  double d0 = std::floor(std::log10(vmin)), d1 = std::ceil(std::log10(vmax));
  if (d0 == d1) d1 += 1;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double n) { return kLeft + (n - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (d1 - std::log10(v)) / (d1 - d0) * ph; };

  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int n = nmin; n <= nmax; ++n) {
    s << "<line x1=\"" << px(n) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(n) << "\" y2=\"" << kTop + ph + 5
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << px(n) << "\" y=\"" << kTop + ph + 20 << "\" text-anchor=\"middle\">" << n << "</text>\n";
  }
  for (int d = static_cast<int>(d0); d <= static_cast<int>(d1); ++d) {
    const double y = py(std::pow(10.0, d));
    s << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw << "\" y2=\"" << y
      << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">qubits</text>\n";
  s << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << kTop + ph / 2 << ")\">worst-case variance</text>\n";

  int idx = 0;
  for (const auto& [key, rows] : groups) {
    const char* colour = kColours[static_cast<std::size_t>(idx) % kColours.size()];
    for (int pass = 0; pass < 2; ++pass) {
      std::string pts;
      for (const SweepRecord* r : rows) {
        const double v = pass == 0 ? r->optimal_value : r->canonical_value;
        if (!(v > 0)) continue;
        std::ostringstream p;
        p.imbue(std::locale::classic());
        p << px(r->n_qubits) << ',' << py(v) << ' ';
        pts += p.str();
      }
      s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"";
      if (pass == 1) s << " stroke-dasharray=\"6,4\"";
      s << " points=\"" << pts << "\"/>\n";
    }
    const double ly = kTop + 14 + 16 * idx;
    s << "<line x1=\"" << kW - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kW - kRight + 30 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << colour << "\"/>\n";
    s << "<text x=\"" << kW - kRight + 35 << "\" y=\"" << ly << "\">" << experiment_name(key.first).substr(0, 7)
      << " theta=" << format_number(std::round(key.second * 1e4) / 1e4) << "</text>\n";
    ++idx;
  }
  const double ly = kTop + 14 + 16 * idx + 8;
  s << "<text x=\"" << kW - kRight + 10 << "\" y=\"" << ly << "\">solid: optimal</text>\n";
  s << "<text x=\"" << kW - kRight + 10 << "\" y=\"" << ly + 16 << "\">dashed: canonical</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string report_json(const MinimaxReport& report, bool deterministic_output, int indent) {
  json j;
  j["optimal_value"] = report.optimal_value;
  if (report.x_star) {
    const RealVector& x = report.x_star->values();
    j["x_star"] = std::vector<double>(x.data(), x.data() + x.size());
  } else {
    j["x_star"] = nullptr;
  }
  if (report.rho_star) {
    const ComplexMatrix& m = report.rho_star->matrix();
    json flat = json::array();
    for (long r = 0; r < m.rows(); ++r) {
      for (long c = 0; c < m.cols(); ++c) flat.push_back({m(r, c).real(), m(r, c).imag()});
    }
    j["rho_star"] = std::move(flat);
  } else {
    j["rho_star"] = nullptr;
  }
  j["rho_rank"] = report.rho_rank;
  j["duality_gap"] = report.duality_gap;
  j["canonical_worst_case"] = report.canonical_worst_case;
  j["spread_bound"] = report.spread_bound;
  j["iterations_per_restart"] = report.iterations_per_restart;
  j["wall_time"] = deterministic_output ? 0.0 : report.wall_time;
  j["converged"] = report.converged;
  j["projected_gradient_norm"] = report.projected_gradient_norm;
  j["best_restart"] = report.best_restart;
  j["polish_iterations"] = report.polish_iterations;
  return j.dump(indent) + "\n";
}

void check_outputs_writable(const OutputPaths& outputs) {
  std::vector<std::string> files = {outputs.csv_path, fits_path_for(outputs.csv_path)};
  if (outputs.svg_path) files.push_back(*outputs.svg_path);
  for (const auto& f : files) {
    ensure_parent(f);
    const bool existed = fs::exists(f);
    std::ofstream probe(f, std::ios::app);
    if (!probe) throw IoError("cannot write " + f);
    probe.close();
    if (!existed) fs::remove(f);
  }
  if (!outputs.report_dir.empty()) {
    std::error_code ec;
    fs::create_directories(outputs.report_dir, ec);
    if (ec || !fs::is_directory(outputs.report_dir)) throw IoError("cannot create report_dir " + outputs.report_dir);
  }
}

void write_outputs(const ExperimentConfig& config, const std::vector<SweepRecord>& records,
                   bool deterministic_output) {
  check_outputs_writable(config.outputs);
  write_file(config.outputs.csv_path, sweep_csv(records));
  write_file(fits_path_for(config.outputs.csv_path), fits_csv(fit_series(records)));
  if (config.outputs.svg_path) write_file(*config.outputs.svg_path, sweep_svg(records));
  if (!config.outputs.report_dir.empty()) {
    for (const auto& r : records) {
      if (!r.report) continue;
      const std::string name = std::string(experiment_name(r.experiment)) + "_N" + std::to_string(r.n_qubits) +
                               "_theta" + format_number(r.theta) + ".json";
      write_file((fs::path(config.outputs.report_dir) / name).string(),
                 report_json(*r.report, deterministic_output));
    }
  }
}

}  // namespace shadowmm
