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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qsl/experiments.hpp"

namespace {

constexpr int kViolation = 1;
constexpr int kFailure = 2;

struct Globals {
  std::string out_dir = ".";
  double tol_scale = 1.0;
  std::uint64_t seed = 0;

  qsl::RunOptions options() const { return {out_dir, tol_scale}; }
};

void print_files(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent/incoherent speed limits for observables of open quantum systems"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out-dir", g.out_dir, "Directory for all outputs")->capture_default_str();
  app.add_option("--tol-scale", g.tol_scale, "Multiplier on every check slack")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for randomized runs")->capture_default_str();

  auto* run = app.add_subcommand("run", "Evolve a scenario config and write speed reports");
  std::string config_path;
  run->add_option("config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);

  auto* fig2 = app.add_subcommand("fig2", "Dephased qubit rotation: saturation patterns");
  double omega = 1.0, kappa = 0.1, fig2_t = 10.0;
  std::size_t fig2_steps = 4000;
  std::string init = "both";
  fig2->add_option("--omega", omega)->capture_default_str();
  fig2->add_option("--kappa", kappa)->check(CLI::NonNegativeNumber)->capture_default_str();
  fig2->add_option("--init", init, "z1, diag or both")
      ->check(CLI::IsMember({"z1", "diag", "both"}))
      ->capture_default_str();
  fig2->add_option("--t-max", fig2_t)->check(CLI::PositiveNumber)->capture_default_str();
  fig2->add_option("--steps", fig2_steps)->check(CLI::Range(2, 100000000))->capture_default_str();

  auto* erasure = app.add_subcommand("erasure", "Reset with and without a coherent speedup drive");
  qsl::ErasureParams ep;
  erasure->add_option("--a", ep.a)->capture_default_str();
  erasure->add_option("--b", ep.b)->capture_default_str();
  erasure->add_option("--gamma", ep.gamma)->check(CLI::NonNegativeNumber)->capture_default_str();
  erasure->add_option("--epsilon", ep.epsilon)->check(CLI::NonNegativeNumber)->capture_default_str();
  erasure->add_option("--t-max", ep.t_max)->check(CLI::PositiveNumber)->capture_default_str();
  erasure->add_option("--steps", ep.steps)->check(CLI::Range(2, 100000000))->capture_default_str();

  auto* env = app.add_subcommand("envcheck", "Energy-variance bounds on random system-environment unitaries");
  std::size_t scenarios = 200, instants = 100;
  double env_t = 1.0;
  env->add_option("--scenarios", scenarios)->capture_default_str();
  env->add_option("--instants", instants)->check(CLI::PositiveNumber)->capture_default_str();
  env->add_option("--t-max", env_t)->check(CLI::PositiveNumber)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Random invariant sweep");
  std::size_t trials = 1000;
  qsl::Index dim_lo = 2, dim_hi = 8;
  verify->add_option("--trials", trials)->capture_default_str();
  verify->add_option("--dim-lo", dim_lo)->check(CLI::Range(2, 64))->capture_default_str();
  verify->add_option("--dim-hi", dim_hi)->check(CLI::Range(2, 64))->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      qsl::ScenarioConfig config = qsl::load_config(config_path);
      const qsl::ScenarioResult r = qsl::run_scenario(config, g.options());
      print_files(r.files);
      return 0;
    }
    if (*fig2) {
      for (const char* which : {"z1", "diag"}) {
        if (init != "both" && init != which) continue;
        const qsl::Fig2Summary s =
            qsl::fig2_experiment(omega, kappa, *qsl::parse_fig2_init(which), fig2_t, fig2_steps, g.options());
        print_files(s.files);
        for (const auto& o : s.observables) {
          std::cout << which << " " << o.name << ": max upper gap " << o.max_upper_gap << ", max lower gap "
                    << o.max_lower_gap << ", pattern " << o.pattern_checked - o.pattern_mismatches << "/"
                    << o.pattern_checked << "\n";
        }
      }
      return 0;
    }
    if (*erasure) {
      const qsl::ErasureRun r = qsl::run_erasure(ep, g.options());
      print_files(r.files);
      const auto& c = r.comparison;
      std::cout << "rate error incoherent " << c.max_rate_error_inc << ", enhanced " << c.max_rate_error_enh
                << ", enhanced dominates: " << (c.enhanced_dominates ? "yes" : "no") << "\n";
      return c.enhanced_dominates ? 0 : kViolation;
    }
    if (*env) {
      const qsl::EnvcheckSummary s = qsl::envcheck(g.seed, scenarios, instants, env_t, g.tol_scale);
      const auto path = std::filesystem::path(g.out_dir) / ("envcheck-" + std::to_string(g.seed) + ".json");
      qsl::write_text(path, qsl::to_json(s) + "\n");
      std::cout << "wrote " << path.string() << "\n"
                << "F_coh <= 4 var(H_sys): " << s.coh_violations << "/" << s.checks << " violated\n"
                << "F_inc <= 4 var(H_int): " << s.inc_violations << "/" << s.checks << " violated, "
                << s.strict_violations << " not strict\n"
                << "F_coh <= 4 var(H_eff): " << s.eff_violations << " violated\n";
      return s.ok() ? 0 : kViolation;
    }
    if (*verify) {
      if (dim_hi < dim_lo) throw qsl::ContractError("--dim-hi must not be below --dim-lo");
      const qsl::VerifySummary s = qsl::verify_sweep(g.seed, trials, dim_lo, dim_hi, g.tol_scale);
      const auto path = std::filesystem::path(g.out_dir) / ("verify-" + std::to_string(g.seed) + ".json");
      qsl::write_text(path, qsl::to_json(s) + "\n");
      std::cout << "wrote " << path.string() << "\n";
      for (const auto& st : s.invariants) {
        if (st.failures) std::cout << "FAIL " << st.name << ": " << st.failures << "/" << st.checks << "\n";
      }
      for (const auto& m : s.error_messages) std::cout << "error " << m << "\n";
      std::cout << (s.ok() ? "all invariants hold" : "invariant violations") << "\n";
      return s.ok() ? 0 : kViolation;
    }
  } catch (const qsl::BoundViolationError& e) {
    std::cerr << "bound violation: " << e.what() << "\n";
    return kViolation;
  } catch (const qsl::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return 0;
}
