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

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "oracles.hpp"
#include "shadowmm/error.hpp"
#include "shadowmm/experiment.hpp"

using namespace shadowmm;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("shadowmm_test_experiment_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string minimal_config(const std::string& extra = "") {
  return R"({"experiment": "product_observable", "theta_grid": [0.5], "n_qubits": [1],
             "outputs": {"csv_path": "out.csv"})" + extra + "}";
}

}  // namespace

TEST_CASE("product observable problems") {
  const Problem p0 = product_observable(0.0, 1);
  CHECK((p0.obs.matrix() - 0.5 * (oracle::pauli_i() + oracle::pauli_z())).cwiseAbs().maxCoeff() < 1e-15);
  const Problem p1 = product_observable(kPi / 2, 1);
  CHECK((p1.obs.matrix() - 0.5 * (oracle::pauli_i() + oracle::pauli_x())).cwiseAbs().maxCoeff() < 1e-15);
  for (int n : {1, 2, 3}) {
    const Problem p = product_observable(0.37, n);
    CHECK(p.obs.trace() == doctest::Approx(1.0));
    CHECK(p.povm.size() == (1 << (2 * n)));
  }
  CHECK_THROWS_AS(product_observable(0.1, 6), ResourceCap);
  CHECK_NOTHROW(product_observable(0.1, 1, kLargeMaxQubits));
  CHECK_THROWS_AS(product_observable(0.1, 0), InvalidArgument);
}

TEST_CASE("Pauli-sum problems") {
  const Problem one = pauli_sum_observable(0.8, 1);
  const RealVector e1 = one.obs.eigenvalues();
  CHECK(e1[0] == doctest::Approx(-1.0));
  CHECK(e1[1] == doctest::Approx(1.0));
  const RealVector e2 = pauli_sum_observable(0.0, 2).obs.eigenvalues();
  CHECK(e2[0] == doctest::Approx(-2.0));
  CHECK(std::abs(e2[1]) < 1e-14);
  CHECK(std::abs(e2[2]) < 1e-14);
  CHECK(e2[3] == doctest::Approx(2.0));
  for (double t : {0.0, 0.6, kPi / 2}) CHECK(std::abs(pauli_sum_observable(t, 3).obs.trace()) < 1e-13);
}

TEST_CASE("product canonical coefficients are Kronecker powers and equal the tensor problem's") {
  const CoefficientVector x1 = canonical_product_coefficients(0.0, 1);
  const CoefficientVector x2 = canonical_product_coefficients(0.0, 2);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) CHECK(x2[4 * j + k] == doctest::Approx(x1[j] * x1[k]));
  for (double t : {0.0, 0.4, 1.2}) {
    const Problem p = product_observable(t, 2);
    const CoefficientVector direct = canonical_coefficients(p.povm, observable_coeffs(p.obs, p.povm.basis()));
    const CoefficientVector prod = canonical_product_coefficients(t, 2, p);
    CHECK(prod.residual() <= 1e-8);
    CHECK((prod.values() - direct.values()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("sum canonical coefficients") {
  const Problem one = pauli_sum_observable(0.3, 1);
  const CoefficientVector c = canonical_sum_coefficients(0.3, 1, one);
  CHECK((c.values() - canonical_coefficients(one.povm, observable_coeffs(one.obs, one.povm.basis())).values())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK(canonical_sum_coefficients(kPi / 3, 3).residual() <= 1e-8);
  const CoefficientVector c1 = canonical_sum_coefficients(0.0, 1);
  const CoefficientVector c2 = canonical_sum_coefficients(0.0, 2);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) CHECK(c2[4 * j + k] == doctest::Approx(c1[j] + c1[k]));
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"({
    "experiment": "pauli_sum", "theta_grid": {"theta_count": 4}, "n_qubits": [3, 2],
    "minimax": {"restarts": 3, "grad_tol": 1e-6, "polish_iters": 5}, "seed": 18446744073709551615,
    "outputs": {"csv_path": "a.csv", "svg_path": "a.svg", "report_dir": "r"}})");
  CHECK(c.experiment == ExperimentKind::kPauliSum);
  REQUIRE(c.theta_grid.size() == 4);
  CHECK(c.theta_grid.back() == doctest::Approx(kPi / 2));
  CHECK(c.theta_grid.front() == doctest::Approx(kPi / 8));
  CHECK(c.n_qubits == std::vector<int>{3, 2});
  CHECK(c.minimax.restarts == 3);
  CHECK(c.minimax.polish_iters == 5);
  CHECK(c.minimax.max_iters == MinimaxOptions{}.max_iters);
  CHECK(c.seed == 18446744073709551615ULL);
  CHECK(c.outputs.svg_path == std::optional<std::string>("a.svg"));
  CHECK(c.outputs.report_dir == "r");
  CHECK_NOTHROW(c.validate());
  CHECK(theta_grid_from_count(30).size() == 30);

  CHECK_NOTHROW(parse_config(minimal_config()));
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config("[]"), ConfigError);
  CHECK_THROWS_AS(parse_config(minimal_config(R"(, "colour": 1)")), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "ghz", "theta_grid": [0], "n_qubits": [1],
                                   "outputs": {"csv_path": "x"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "pauli_sum", "theta_grid": [0], "n_qubits": [1],
                                   "outputs": {"csv_path": "x"}, "minimax": {"speed": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "pauli_sum", "theta_grid": [0], "n_qubits": "2",
                                   "outputs": {"csv_path": "x"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "pauli_sum", "theta_grid": [0], "n_qubits": [1],
                                   "outputs": {}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "pauli_sum", "theta_grid": {"count": 3}, "n_qubits": [1],
                                   "outputs": {"csv_path": "x"}})"),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/shadowmm/config.json"), IoError);
}

TEST_CASE("config validation") {
  ExperimentConfig c = parse_config(minimal_config());
  SUBCASE("empty N list") {
    c.n_qubits.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("empty theta list") {
    c.theta_grid.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("theta out of range") {
    c.theta_grid = {2.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("N above the cap") {
    c.n_qubits = {6};
    CHECK_THROWS_AS(c.validate(), ResourceCap);
    CHECK_NOTHROW(c.validate(kLargeMaxQubits));
  }
  SUBCASE("single needs one point") {
    c.experiment = ExperimentKind::kSingle;
    c.n_qubits = {1, 2};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("bad minimax options") {
    c.minimax.restarts = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
}

TEST_CASE("sweep records are sorted, bounded and reproducible across thread counts") {
  ExperimentConfig c = parse_config(R"({"experiment": "product_observable", "theta_grid": [0.7853981633974483, 0.0],
                                        "n_qubits": [3, 1, 2], "seed": 5, "outputs": {"csv_path": "x.csv"}})");
  const auto a = run_sweep(c, {1, true, kDefaultMaxQubits});
  const auto b = run_sweep(c, {4, true, kDefaultMaxQubits});
  REQUIRE(a.size() == 6);
  CHECK(sweep_csv(a) == sweep_csv(b));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(i);
    CHECK(a[i].n_qubits == static_cast<int>(1 + i / 2));
    CHECK(a[i].theta == (i % 2 == 0 ? 0.0 : kPi / 4));
    CHECK(a[i].converged);
    CHECK(a[i].error.empty());
    CHECK(a[i].wall_time == 0.0);
    CHECK(a[i].optimal_value <= a[i].canonical_value + 1e-6);
    CHECK(a[i].spread_bound <= a[i].optimal_value + 1e-6);
    CHECK(a[i].canonical_value <= a[i].shadow_norm_canonical + 1e-6);
    if (a[i].theta > 0) CHECK(a[i].optimal_value == doctest::Approx(a[i].canonical_value).epsilon(0.02));
  }
  // theta = 0: the optimized worst case falls away from the canonical one as N grows.
  CHECK(a[4].optimal_value / a[4].canonical_value < a[2].optimal_value / a[2].canonical_value);
}

TEST_CASE("CSV, fits and SVG output") {
  SweepRecord r1;
  r1.theta = 0.5;
  r1.n_qubits = 1;
  r1.optimal_value = 1.0;
  r1.canonical_value = 2.0;
  r1.converged = true;
  SweepRecord r2 = r1;
  r2.n_qubits = 2;
  r2.optimal_value = std::exp(1.0);
  r2.canonical_value = 2.0 * std::exp(2.0);
  r2.converged = false;
  const std::string csv = sweep_csv({r1, r2});
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  CHECK(header ==
        "experiment,theta,n_qubits,optimal_value,canonical_value,spread_bound,shadow_norm_canonical,rho_rank,"
        "duality_gap,converged,wall_time_s");
  std::getline(lines, row);
  CHECK(row == "product_observable,0.5,1,1,2,0,0,0,0,true,0");
  std::getline(lines, row);
  CHECK(row.find(",false,") != std::string::npos);

  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.5e-12) == "-2.5e-12");
  CHECK(std::stod(format_number(kPi)) == kPi);

  const auto fits = fit_series({r1, r2});
  REQUIRE(fits.size() == 2);
  for (const auto& f : fits) {
    CHECK(f.n_points == 2);
    CHECK(f.exp_rate == doctest::Approx(f.series == "optimal" ? 1.0 : 2.0));
  }
  CHECK(fits_csv(fits).rfind("experiment,theta,series,exp_rate,power_exponent,n_points\n", 0) == 0);
  CHECK(fits_path_for("dir/sweep.csv") == "dir/sweep_fits.csv");

  const std::string svg = sweep_svg({r1, r2});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("report JSON fields") {
  const Problem p = product_observable(0.3, 1);
  const MinimaxReport r = maximize_over_states(p.povm, p.obs, MinimaxOptions{});
  const auto j = nlohmann::json::parse(report_json(r, true));
  for (const char* k : {"optimal_value", "x_star", "rho_star", "rho_rank", "duality_gap", "canonical_worst_case",
                        "spread_bound", "iterations_per_restart", "wall_time", "converged",
                        "projected_gradient_norm", "best_restart"}) {
    CAPTURE(k);
    CHECK(j.contains(k));
  }
  CHECK(j["wall_time"].get<double>() == 0.0);
  REQUIRE(j["rho_star"].size() == 4);
  CHECK(j["rho_star"][1].size() == 2);
  CHECK(j["rho_star"][1][0].get<double>() == doctest::Approx(r.rho_star->matrix()(0, 1).real()));
  CHECK(j["rho_star"][2][1].get<double>() == doctest::Approx(r.rho_star->matrix()(1, 0).imag()));
  CHECK(j["x_star"].size() == 4);
  CHECK(j["optimal_value"].get<double>() == r.optimal_value);
}

TEST_CASE("write_outputs creates every file and fails cleanly on unwritable paths") {
  const fs::path dir = scratch("outputs");
  ExperimentConfig c = parse_config(minimal_config());
  c.outputs.csv_path = (dir / "sub" / "sweep.csv").string();
  c.outputs.svg_path = (dir / "sweep.svg").string();
  c.outputs.report_dir = (dir / "reports").string();
  const auto recs = run_sweep(c, {1, true, kDefaultMaxQubits});
  write_outputs(c, recs, true);
  CHECK(slurp(dir / "sub" / "sweep.csv") == sweep_csv(recs));
  CHECK(fs::exists(dir / "sub" / "sweep_fits.csv"));
  CHECK(fs::exists(dir / "sweep.svg"));
  CHECK(fs::exists(dir / "reports" / "product_observable_N1_theta0.5.json"));

  std::ofstream(dir / "blocker") << "file";
  ExperimentConfig bad = c;
  bad.outputs.csv_path = (dir / "blocker" / "x.csv").string();
  CHECK_THROWS_AS(check_outputs_writable(bad.outputs), IoError);
  fs::remove_all(dir);
}
