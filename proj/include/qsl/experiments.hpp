// Copyright 2026 The qsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsl/bounds.hpp"
#include "qsl/config.hpp"
#include "qsl/geometry.hpp"
#include "qsl/speedup.hpp"

namespace qsl {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  double tol_scale = 1.0;  // multiplies every slack used by the runtime checks
};

const std::vector<std::string>& speed_csv_header();
std::vector<std::string> speed_csv_row(double t, const std::string& observable, const SpeedReport& r);

// Pointwise bound chain of one report; throws BoundViolationError.
void check_speed_report(const SpeedReport& r, double t, double tol_scale = 1.0);

Generator build_generator(const ScenarioConfig& config);
DensityMatrix build_initial_state(const ScenarioConfig& config, const ToleranceSet& tol = {});
std::vector<std::pair<std::string, HermitianOperator>> build_observables(const ScenarioConfig& config);

struct ScenarioResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::pair<std::string, IntegratedReport>> integrated;
  std::size_t speed_rows = 0;
  std::size_t projections = 0;
};

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options);

enum class Fig2Init { Z1, Diag };
std::optional<Fig2Init> parse_fig2_init(const std::string& token);
std::string to_string(Fig2Init init);

struct Fig2ObservableSummary {
  std::string name;
  double max_upper_gap = 0.0;  // max over t of bound_upper - |a_dot|
  double max_lower_gap = 0.0;  // max over t of |a_dot| - bound_lower
  double median_upper_gap = 0.0;
  double median_lower_gap = 0.0;
  std::size_t instants = 0;
  std::size_t saturated_instants = 0;  // either gap below 1e-7
  std::size_t pattern_checked = 0;     // instants with both speed components clearly nonzero
  std::size_t pattern_mismatches = 0;  // saturation not where the signs of the alphas say
};

struct Fig2Summary {
  double omega = 0.0;
  double kappa = 0.0;
  Fig2Init init = Fig2Init::Z1;
  double t_max = 0.0;
  std::size_t steps = 0;
  std::vector<Fig2ObservableSummary> observables;
  std::vector<std::filesystem::path> files;
};

// H = (omega/2) sy with dephasing -kappa [sz, [sz, rho]], observables sx and sz.
ScenarioConfig fig2_config(double omega, double kappa, Fig2Init init, double t_max, std::size_t steps);
Fig2Summary fig2_experiment(double omega, double kappa, Fig2Init init, double t_max, std::size_t steps,
                            const RunOptions& options);

struct ErasureParams {
  double a = 0.9238795325112867;  // cos(pi/8)
  double b = 0.3826834323650898;  // sin(pi/8)
  double gamma = 1.0;
  double epsilon = 0.5;
  double t_max = 5.0;
  std::size_t steps = 5000;
};

struct ErasureRun {
  ErasureComparison comparison;
  std::vector<std::filesystem::path> files;
};

ErasureRun run_erasure(const ErasureParams& params, const RunOptions& options);

struct EnvcheckSummary {
  std::uint64_t seed = 0;
  std::size_t scenarios = 0;
  std::size_t instants = 0;
  std::size_t checks = 0;
  std::size_t coh_violations = 0;
  double worst_coh_excess = 0.0;
  std::size_t inc_violations = 0;
  double worst_inc_excess = 0.0;
  std::size_t strict_violations = 0;
  double min_inc_relative_gap = 0.0;  // min (4 var_h_int - F_inc) / F_inc over F_inc > 1e-9
  std::size_t eff_violations = 0;
  std::size_t eff_unavailable = 0;
  bool ok() const { return coh_violations == 0 && inc_violations == 0 && strict_violations == 0; }
};

// Random two-qubit system-environment unitaries with product initial states.
EnvcheckSummary envcheck(std::uint64_t seed, std::size_t scenarios, std::size_t instants, double t_max,
                         double tol_scale = 1.0);
std::string to_json(const EnvcheckSummary& s);

struct InvariantStat {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double max_excess = 0.0;      // largest residual (identities) or lhs - rhs (inequalities)
  double max_normalized = 0.0;  // largest residual divided by its allowed slack
};

struct VerifySummary {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  Index dim_lo = 2;
  Index dim_hi = 8;
  double tol_scale = 1.0;
  std::vector<InvariantStat> invariants;
  std::size_t errors = 0;  // trials that raised instead of finishing
  std::vector<std::string> error_messages;

  bool ok() const;
  const InvariantStat* find(const std::string& name) const;
};

VerifySummary verify_sweep(std::uint64_t seed, std::size_t trials, Index dim_lo, Index dim_hi,
                           double tol_scale = 1.0);
std::string to_json(const VerifySummary& s);
std::string to_json(const Fig2Summary& s);
std::string to_json(const IntegratedReport& r);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qsl
