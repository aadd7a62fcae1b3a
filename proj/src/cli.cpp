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

#include "shadowmm/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "shadowmm/checks.hpp"
#include "shadowmm/error.hpp"
#include "shadowmm/experiment.hpp"
#include "shadowmm/minimax.hpp"
#include "shadowmm/random.hpp"
#include "shadowmm/simulator.hpp"

namespace shadowmm {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
  std::optional<double> eps;
  bool deterministic_output = false;
  bool allow_large = false;
};

struct OptimizeFlags {
  std::string builtin;
  int qubits = 1;
  std::string observable = "Z";
  std::string povm_file;
  std::string observable_file;
};

struct SampleFlags {
  int qubits = 2;
  std::string observable = "pauli-sum:0.7";
  int trials = 500;
  double epsilon = 0.25;
  double delta = 0.05;
  std::uint64_t shots = 100000;
};

int default_threads() {
  if (const char* env = std::getenv("SHADOWMM_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

// Entries may be plain numbers or [re, im] pairs.
ComplexMatrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a non-empty matrix");
  const auto rows = static_cast<long>(j.size());
  ComplexMatrix m(rows, rows);
  for (long r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<long>(row.size()) != rows) {
      throw ConfigError(std::string(what) + ": matrix must be square");
    }
    for (long c = 0; c < rows; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (v.is_number()) {
        m(r, c) = Complex(v.get<double>(), 0.0);
      } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        m(r, c) = Complex(v[0].get<double>(), v[1].get<double>());
      } else {
        throw ConfigError(std::string(what) + ": entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

HermitianOperator named_observable(const std::string& spec, int qubits, int max_qubits) {
  auto param = [&](const std::string& prefix) -> std::optional<double> {
    if (spec.rfind(prefix, 0) != 0) return std::nullopt;
    try {
      return std::stod(spec.substr(prefix.size()));
    } catch (const std::exception&) {
      throw ConfigError("bad angle in observable '" + spec + "'");
    }
  };
  if (auto t = param("projector:")) return product_observable(*t, qubits, max_qubits).obs;
  if (auto t = param("pauli-sum:")) return pauli_sum_observable(*t, qubits, max_qubits).obs;
  HermitianOperator single = pauli::Z();
  if (spec == "Z") single = pauli::Z();
  else if (spec == "X") single = pauli::X();
  else if (spec == "I") single = pauli::I();
  else throw ConfigError("unknown observable '" + spec + "' (Z, X, I, projector:<theta>, pauli-sum:<theta>)");
  HermitianOperator out = single;
  for (int i = 1; i < qubits; ++i) out = kron(out, single);
  return out;
}

struct LoadedProblem {
  std::optional<Povm> povm;
  std::optional<HermitianOperator> obs;
};

LoadedProblem load_problem(const OptimizeFlags& f, int max_qubits) {
  LoadedProblem lp;
  if (!f.povm_file.empty()) {
    const json j = [&] {
      try {
        return json::parse(read_text(f.povm_file));
      } catch (const json::parse_error& e) {
        throw ConfigError("povm file is not valid JSON: " + std::string(e.what()));
      }
    }();
    if (!j.is_object() || !j.contains("effects") || !j["effects"].is_array()) {
      throw ConfigError("povm file needs an \"effects\" array");
    }
    std::vector<HermitianOperator> effects;
    for (const auto& e : j["effects"]) effects.push_back(HermitianOperator::from_matrix(matrix_from_json(e, "effect")));
    lp.povm = Povm::create(std::move(effects));
  } else {
    if (f.builtin != "xz") throw ConfigError("optimize needs --builtin xz or --povm-file");
    if (f.qubits < 1 || f.qubits > max_qubits) {
      throw ResourceCap("--qubits must lie in [1, " + std::to_string(max_qubits) + "]");
    }
    lp.povm = tensor_power(build_xz_povm(), f.qubits);
  }
  if (!f.observable_file.empty()) {
    const json j = [&] {
      try {
        return json::parse(read_text(f.observable_file));
      } catch (const json::parse_error& e) {
        throw ConfigError("observable file is not valid JSON: " + std::string(e.what()));
      }
    }();
    const json& m = j.is_object() && j.contains("matrix") ? j["matrix"] : j;
    lp.obs = HermitianOperator::from_matrix(matrix_from_json(m, "observable"));
  } else {
    // Named observables act on every qubit of the POVM.
    int q = 0;
    for (int d = lp.povm->dim(); d > 1; d >>= 1) ++q;
    if ((1 << q) != lp.povm->dim()) throw ConfigError("named observables need a power-of-two dimension");
    lp.obs = named_observable(f.observable, q, max_qubits);
  }
  if (lp.obs->dim() != lp.povm->dim()) throw DimensionMismatch("observable and POVM dimensions differ");
  return lp;
}

MinimaxOptions minimax_from_flags(const GlobalFlags& g, int threads) {
  MinimaxOptions o;
  if (g.seed) o.seed = *g.seed;
  if (g.eps) o.eps_regularization = *g.eps;
  o.threads = threads;
  o.validate();
  return o;
}

int run_optimize(const GlobalFlags& g, const OptimizeFlags& f, int threads, std::ostream& out,
                 std::ostream& err) {
  const int max_q = g.allow_large ? kLargeMaxQubits : kDefaultMaxQubits;
  const LoadedProblem lp = load_problem(f, max_q);
  const MinimaxReport rep = maximize_over_states(*lp.povm, *lp.obs, minimax_from_flags(g, threads));
  const std::string text = report_json(rep, g.deterministic_output);
  out << text;
  if (!g.out.empty()) write_text((fs::path(g.out) / "report.json").string(), text);
  if (!rep.converged) {
    err << "optimize: not converged (projected gradient norm " << rep.projected_gradient_norm << ")\n";
    return kExitConvergence;
  }
  return kExitOk;
}

std::string rebase(const std::string& path, const std::string& dir) {
  if (dir.empty() || path.empty()) return path;
  return (fs::path(dir) / fs::path(path).filename()).string();
}

int run_sweep_command(const GlobalFlags& g, ExperimentKind family, int threads, std::ostream& out,
                      std::ostream& err) {
  if (g.config.empty()) throw ConfigError("sweep commands need --config <path>");
  ExperimentConfig cfg = load_config(g.config);
  const bool matches = family == ExperimentKind::kPauliSum
                           ? cfg.experiment == ExperimentKind::kPauliSum
                           : cfg.experiment != ExperimentKind::kPauliSum;
  if (!matches) {
    throw ConfigError("config experiment '" + std::string(experiment_name(cfg.experiment)) +
                      "' does not match this subcommand");
  }
  if (g.seed) cfg.seed = *g.seed;
  if (g.eps) cfg.minimax.eps_regularization = *g.eps;
  if (!g.out.empty()) {
    cfg.outputs.csv_path = rebase(cfg.outputs.csv_path, g.out);
    if (cfg.outputs.svg_path) cfg.outputs.svg_path = rebase(*cfg.outputs.svg_path, g.out);
    if (!cfg.outputs.report_dir.empty()) {
      cfg.outputs.report_dir = (fs::path(g.out) / fs::path(cfg.outputs.report_dir).filename()).string();
    }
  }
  SweepOptions so;
  so.threads = threads;
  so.deterministic_output = g.deterministic_output;
  so.max_qubits = g.allow_large ? kLargeMaxQubits : kDefaultMaxQubits;
  cfg.validate(so.max_qubits);
  check_outputs_writable(cfg.outputs);

  const std::vector<SweepRecord> records = run_sweep(cfg, so);
  write_outputs(cfg, records, g.deterministic_output);
  int failed = 0;
  for (const auto& r : records) {
    if (!r.converged) {
      ++failed;
      err << "point N=" << r.n_qubits << " theta=" << format_number(r.theta) << " did not converge";
      if (!r.error.empty()) err << ": " << r.error;
      err << "\n";
    }
  }
  out << "wrote " << records.size() << " records to " << cfg.outputs.csv_path << "\n";
  return failed == 0 ? kExitOk : kExitConvergence;
}

int run_sample(const GlobalFlags& g, const SampleFlags& f, int threads, std::ostream& out) {
  const int max_q = g.allow_large ? kLargeMaxQubits : kDefaultMaxQubits;
  OptimizeFlags of;
  of.builtin = "xz";
  of.qubits = f.qubits;
  of.observable = f.observable;
  const LoadedProblem lp = load_problem(of, max_q);
  const MinimaxOptions mo = minimax_from_flags(g, threads);
  const MinimaxReport rep = maximize_over_states(*lp.povm, *lp.obs, mo);
  const Povm reg = regularize_povm(*lp.povm, mo.eps_regularization);
  const RealVector& x = rep.x_star->values();
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));

  SampleSizeQuery q;
  q.sigma_sq = rep.optimal_value;
  q.epsilon = f.epsilon;
  q.delta = f.delta;
  const std::uint64_t k = hoeffding_sample_size(q);
  CounterRng rng(mo.seed, 0x5a17);
  const DensityMatrix rho = random::density(reg.dim(), rng);
  const CoverageResult cov = coverage_test(rho, reg, xs, f.epsilon, f.trials, k, mo.seed);
  const SingleShotStats ss = single_shot_variance(rho, reg, xs, f.shots, mo.seed + 1);

  json j;
  j["optimal_value"] = rep.optimal_value;
  j["hoeffding_shots"] = k;
  j["epsilon"] = f.epsilon;
  j["delta"] = f.delta;
  j["trials"] = cov.trials;
  j["coverage"] = cov.rate();
  j["single_shot_variance"] = ss.variance;
  j["single_shot_standard_error"] = ss.standard_error;
  j["variance_within_bound"] = ss.variance <= rep.optimal_value + 3 * ss.standard_error;
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (!g.out.empty()) write_text((fs::path(g.out) / "sample.json").string(), text);
  const bool ok = cov.rate() >= 1.0 - f.delta && j["variance_within_bound"].get<bool>();
  return ok ? kExitOk : kExitConvergence;
}

int run_check(const GlobalFlags& g, std::ostream& out) {
  const auto results = run_self_checks(g.seed.value_or(0));
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.passed;
  }
  return all ? kExitOk : kExitConvergence;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variance-optimal post-processing for POVM shadow estimators", "shadowmm"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config, "JSON experiment configuration");
  app.add_option("--seed", g.seed, "Seed for restarts and sampling");
  app.add_option("--threads", g.threads, "Worker threads (default 1, or SHADOWMM_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--eps", g.eps, "POVM regularization strength in [0, 1)");
  app.add_flag("--deterministic-output", g.deterministic_output, "Zero wall times in outputs");
  app.add_flag("--allow-large", g.allow_large, "Raise the qubit cap to 6");

  OptimizeFlags of;
  auto* opt = app.add_subcommand("optimize", "Solve one POVM/observable pair and print the report as JSON");
  opt->add_option("--builtin", of.builtin, "Built-in POVM family (xz)");
  opt->add_option("--qubits", of.qubits, "Number of qubits for the built-in POVM");
  opt->add_option("--observable", of.observable, "Z, X, I, projector:<theta> or pauli-sum:<theta>");
  opt->add_option("--povm-file", of.povm_file, "JSON file {\"effects\": [matrix, ...]}");
  opt->add_option("--observable-file", of.observable_file, "JSON file {\"matrix\": matrix}");

  auto* sp = app.add_subcommand("sweep-product", "Product-observable sweep from --config");
  auto* ss = app.add_subcommand("sweep-pauli-sum", "Pauli-sum sweep from --config");

  SampleFlags sf;
  auto* smp = app.add_subcommand("sample", "Coverage test of the optimized estimator at the Hoeffding size");
  smp->add_option("--qubits", sf.qubits, "Number of qubits");
  smp->add_option("--observable", sf.observable, "Observable, as for optimize");
  smp->add_option("--trials", sf.trials, "Coverage trials")->check(CLI::PositiveNumber);
  smp->add_option("--epsilon", sf.epsilon, "Accuracy")->check(CLI::PositiveNumber);
  smp->add_option("--delta", sf.delta, "Failure probability")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  smp->add_option("--shots", sf.shots, "Shots for the single-shot variance estimate");

  auto* chk = app.add_subcommand("check", "Run the property suites and print pass/fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }

  const int threads = g.threads.value_or(default_threads());
  try {
    if (*opt) return run_optimize(g, of, threads, out, err);
    if (*sp) return run_sweep_command(g, ExperimentKind::kProductObservable, threads, out, err);
    if (*ss) return run_sweep_command(g, ExperimentKind::kPauliSum, threads, out, err);
    if (*smp) return run_sample(g, sf, threads, out);
    if (*chk) return run_check(g, out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace shadowmm
