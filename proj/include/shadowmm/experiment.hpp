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

// The two qubit experiment families on the N-fold XZ POVM, sweep runner and
// its outputs (CSV, fit sidecar, SVG chart, per-point JSON reports).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shadowmm/frame.hpp"
#include "shadowmm/minimax.hpp"

namespace shadowmm {

inline constexpr int kDefaultMaxQubits = 5;
inline constexpr int kLargeMaxQubits = 6;

struct Problem {
  Povm povm;
  HermitianOperator obs;
};

/// cos(theta/2)|0> + sin(theta/2)|1>.
ComplexVector rotated_state(double theta);
/// cos(theta/2) X + sin(theta/2) Z.
HermitianOperator rotated_pauli(double theta);

/// XZ POVM to the N and the projector |psi(theta)><psi(theta)| to the N.
Problem product_observable(double theta, int n_qubits, int max_qubits = kDefaultMaxQubits);
/// Same POVM, observable sum_i rotated_pauli(theta) on site i.
Problem pauli_sum_observable(double theta, int n_qubits, int max_qubits = kDefaultMaxQubits);

/// Tensor power of the single-qubit canonical vector, checked feasible on `p`.
CoefficientVector canonical_product_coefficients(double theta, int n_qubits, const Problem& p);
CoefficientVector canonical_product_coefficients(double theta, int n_qubits);
/// sum_i 1 x .. x c x .. x 1 with c the single-qubit canonical vector of rotated_pauli(theta).
CoefficientVector canonical_sum_coefficients(double theta, int n_qubits, const Problem& p);
CoefficientVector canonical_sum_coefficients(double theta, int n_qubits);

enum class ExperimentKind { kProductObservable, kPauliSum, kSingle };

std::string_view experiment_name(ExperimentKind k);

struct OutputPaths {
  std::string csv_path;
  std::optional<std::string> svg_path;
  /// Per-point JSON reports go here when non-empty.
  std::string report_dir;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kProductObservable;
  std::vector<double> theta_grid;
  std::vector<int> n_qubits;
  MinimaxOptions minimax;
  std::uint64_t seed = 0;
  OutputPaths outputs;

  /// Throws ConfigError (grids, options) or ResourceCap (N above max_qubits).
  void validate(int max_qubits = kDefaultMaxQubits) const;
};

/// theta_s = s / count * pi / 2 for s = 1..count.
std::vector<double> theta_grid_from_count(int count);

/// Parses the JSON config text; unknown keys are a ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
/// Throws IoError when the file cannot be read.
ExperimentConfig load_config(const std::string& path);

struct SweepRecord {
  ExperimentKind experiment = ExperimentKind::kProductObservable;
  double theta = 0.0;
  int n_qubits = 0;
  double optimal_value = 0.0;
  double canonical_value = 0.0;
  double spread_bound = 0.0;
  double shadow_norm_canonical = 0.0;
  int rho_rank = 0;
  double duality_gap = 0.0;
  bool converged = false;
  double wall_time = 0.0;
  /// Set when the point failed; the record is still emitted.
  std::string error;
  std::optional<MinimaxReport> report;
};

struct SweepOptions {
  int threads = 1;
  bool deterministic_output = false;
  int max_qubits = kDefaultMaxQubits;
};

/// Solves every (theta, N) grid point on a worker pool. Records are sorted by
/// (experiment, N, theta). Per-point failures become converged = false.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, const SweepOptions& opts);

/// Shortest round-trip decimal form, locale independent.
std::string format_number(double v);

std::string sweep_csv(const std::vector<SweepRecord>& records);

struct SeriesFit {
  ExperimentKind experiment = ExperimentKind::kProductObservable;
  double theta = 0.0;
  std::string series;  // "optimal" or "canonical"
  /// Least-squares slope of log(value) against N.
  double exp_rate = 0.0;
  /// Least-squares slope of log(value) against log(N).
  double power_exponent = 0.0;
  int n_points = 0;
};

/// Fits for every theta series with at least two positive points.
std::vector<SeriesFit> fit_series(const std::vector<SweepRecord>& records);
std::string fits_csv(const std::vector<SeriesFit>& fits);
/// "<stem>_fits.csv" next to the main CSV.
std::string fits_path_for(const std::string& csv_path);

/// Value against N on a log axis, one colour per theta, canonical dashed.
std::string sweep_svg(const std::vector<SweepRecord>& records);

/// JSON report with rho_star flattened row-major as [re, im] pairs.
std::string report_json(const MinimaxReport& report, bool deterministic_output, int indent = 2);

/// Writes the CSV, fits, optional SVG and optional reports. Throws IoError.
void write_outputs(const ExperimentConfig& config, const std::vector<SweepRecord>& records,
                   bool deterministic_output);
/// Creates parent directories and probes that every output path can be opened.
void check_outputs_writable(const OutputPaths& outputs);

}  // namespace shadowmm
