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

#include "qsl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "qsl/csv.hpp"
#include "qsl/sampling.hpp"

namespace qsl {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

bool wants(const ScenarioConfig& c, const std::string& kind) {
  return std::find(c.outputs.begin(), c.outputs.end(), kind) != c.outputs.end();
}

void ensure_dir(const fs::path& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Violation {
  bool failed = false;
  std::string what;
};

// lhs <= rhs + slack
void need(Violation& v, const char* what, double lhs, double rhs, double slack) {
  if (!v.failed && !(lhs <= rhs + slack)) {
    v.failed = true;
    std::ostringstream os;
    os << what << ": " << lhs << " > " << rhs;
    v.what = os.str();
  }
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
}

const std::vector<std::string>& speed_csv_header() {
  static const std::vector<std::string> h{
      "t",     "observable", "a_dot",    "a_dot_coh",   "a_dot_inc",   "dA",    "dA_coh",
      "dA_inc", "F",         "F_coh",    "F_inc",       "bound_cr",    "bound_coh", "bound_inc",
      "bound_upper", "bound_lower", "ratio", "tau_a", "tau_coh", "tau_inc", "support_corr"};
  return h;
}

std::vector<std::string> speed_csv_row(double t, const std::string& observable, const SpeedReport& r) {
  const auto f = format_number;
  return {f(t),          observable,        f(r.a_dot),        f(r.a_dot_coh), f(r.a_dot_inc),
          f(r.dA),       f(r.dA_coh),       f(r.dA_inc),       f(r.F),         f(r.F_coh),
          f(r.F_inc),    f(r.bound_cr),     f(r.bound_coh),    f(r.bound_inc), f(r.bound_upper),
          f(r.bound_lower), f(r.ratio),     f(r.tau_a),        f(r.tau_coh),   f(r.tau_inc),
          f(r.support_corr)};
}

void check_speed_report(const SpeedReport& r, double t, double tol_scale) {
  const double s = 1e-9 * tol_scale;
  const double c = r.support_corr;
  const double a = std::abs(r.a_dot);
  Violation v;
  need(v, "a_dot != a_dot_coh + a_dot_inc", std::abs(r.a_dot - r.a_dot_coh - r.a_dot_inc), 0.0,
       1e-10 * tol_scale * (1.0 + a + std::abs(r.a_dot_coh) + std::abs(r.a_dot_inc)));
  need(v, "coherent speed above its bound", std::abs(r.a_dot_coh), r.bound_coh, s * (1.0 + r.bound_coh));
  need(v, "incoherent speed above its bound", std::abs(r.a_dot_inc), r.bound_inc + c,
       s * (1.0 + r.bound_inc));
  need(v, "lower bound above the speed", r.bound_lower, a + c, s * (1.0 + r.bound_cr));
  need(v, "speed above the upper bound", a, r.bound_upper + c, s * (1.0 + r.bound_cr));
  need(v, "upper bound above the loose bound", r.bound_upper, r.bound_upper_loose + c,
       s * (1.0 + r.bound_upper_loose));
  need(v, "loose bound above the Cramer-Rao bound", r.bound_upper_loose, r.bound_cr,
       s * (1.0 + r.bound_cr));
  need(v, "speed above the Cramer-Rao bound", a, r.bound_cr + c, s * (1.0 + r.bound_cr));
  need(v, "tightness ratio below one", 1.0, r.ratio, 1e-12 * tol_scale);
  if (v.failed) throw BoundViolationError(v.what, t);
}

Generator build_generator(const ScenarioConfig& config) {
  const Index d = config.dim;
  std::vector<LindbladChannel> channels;
  for (const ChannelSpec& ch : config.channels) channels.push_back({ch.rate, ch.matrix});
  if (!config.hamiltonian) return Generator(d, [d](double) { return HermitianOperator::zero(d); }, channels);
  const HermitianOperator h(config.hamiltonian->matrix);
  const std::string schedule = config.hamiltonian->schedule;
  if (schedule == "constant") return Generator::constant(h, channels);
  schedule_factor(schedule, 0.0);  // validates the token up front
  return Generator(d, [h, schedule](double t) { return h * schedule_factor(schedule, t); }, channels);
}

DensityMatrix build_initial_state(const ScenarioConfig& config, const ToleranceSet& tol) {
  if (config.initial_state.bloch) {
    const auto& b = *config.initial_state.bloch;
    const double r = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    if (r > 1.0 + 1e-12) throw InvalidStateError("Bloch vector longer than one");
    return DensityMatrix::bloch(b[0], b[1], b[2]);
  }
  return DensityMatrix(config.initial_state.matrix, tol);
}

std::vector<std::pair<std::string, HermitianOperator>> build_observables(const ScenarioConfig& config) {
  std::vector<std::pair<std::string, HermitianOperator>> out;
  for (const ObservableSpec& o : config.observables) {
    if (o.pauli) {
      if (config.dim != 2) throw ConfigError("observables." + o.name, "Pauli observables need dim = 2");
      out.emplace_back(o.name, pauli_by_name(*o.pauli));
    } else {
      out.emplace_back(o.name, HermitianOperator(o.matrix));
    }
  }
  return out;
}

std::string to_json(const IntegratedReport& r) {
  Json j;
  j["horizon"] = number(r.horizon);
  j["path_length"] = number(r.path_length);
  j["geodesic_length"] = number(r.geodesic_length);
  j["divergence"] = number(r.divergence);
  j["divergence_coh"] = number(r.divergence_coh);
  j["divergence_inc"] = number(r.divergence_inc);
  j["speed_over_spread"] = number(r.speed_over_spread);
  j["total_change"] = number(r.total_change);
  j["total_change_coh"] = number(r.total_change_coh);
  j["total_change_inc"] = number(r.total_change_inc);
  j["change_bound"] = number(r.change_bound);
  j["change_bound_divergence"] = number(r.change_bound_divergence);
  j["change_bound_inc"] = number(r.change_bound_inc);
  j["change_bound_inc_divergence"] = number(r.change_bound_inc_divergence);
  j["change_bound_coh"] = number(r.change_bound_coh);
  j["change_bound_coh_divergence"] = number(r.change_bound_coh_divergence);
  j["support_correction"] = number(r.support_correction);
  j["flat_instants"] = r.flat_instants;
  return j.dump(2);
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  ToleranceSet tol = tolerances_from(config);
  const Generator gen = build_generator(config);
  const DensityMatrix rho0 = build_initial_state(config, tol);
  if (rho0.dim() != config.dim) throw ConfigError("initial_state", "dimension does not match dim");
  const auto observables = build_observables(config);
  const Trajectory traj = evolve(rho0, gen, config.t_max, config.steps, tol);

  ensure_dir(options.out_dir);
  ScenarioResult result;
  result.projections = traj.projections;

  const bool speed = wants(config, "speed");
  const bool entropy = wants(config, "entropy");
  const bool basis = wants(config, "basis");
  std::optional<CsvWriter> speed_csv, entropy_csv, basis_csv;
  if (speed) {
    speed_csv.emplace(options.out_dir / (config.name + ".speed.csv"), speed_csv_header());
    result.files.push_back(speed_csv->path());
  }
  if (entropy) {
    entropy_csv.emplace(options.out_dir / (config.name + ".entropy.csv"),
                        std::vector<std::string>{"t", "S", "S_dot", "dS", "bound", "sie_cap", "support_flag"});
    result.files.push_back(entropy_csv->path());
  }
  if (basis) {
    basis_csv.emplace(options.out_dir / (config.name + ".basis.csv"),
                      std::vector<std::string>{"t", "observable", "alpha_coh", "alpha_inc", "residual_speed",
                                               "still", "still_degenerate"});
    result.files.push_back(basis_csv->path());
  }

  for (const TrajectoryPoint& pt : traj.points) {
    const SpeedOperators ops = speed_operators(pt);
    for (const auto& [name, a] : observables) {
      const ObservableSplit split = split_observable(a, pt.frame);
      const SpeedReport r = speed_report(split, pt, ops, support_correction(pt, a), tol);
      check_speed_report(r, pt.t, options.tol_scale);
      if (speed_csv) {
        speed_csv->row(speed_csv_row(pt.t, name, r));
        ++result.speed_rows;
      }
      if (basis_csv) {
        const SpeedOperatorBasis b = speed_operator_basis(ops, pt, &a);
        const auto degenerate = std::count(b.still_degenerate.begin(), b.still_degenerate.end(), true);
        basis_csv->row({format_number(pt.t), name, format_number(b.alpha_coh), format_number(b.alpha_inc),
                        format_number(b.residual_speed), std::to_string(b.still.size()),
                        std::to_string(degenerate)});
      }
    }
    if (entropy_csv) {
      const EntropyRate e = entropy_rate_bound(pt, ops);
      if (!e.holds) throw BoundViolationError("entropy rate above its bound", pt.t);
      entropy_csv->row({format_number(pt.t), format_number(e.S), format_number(e.S_dot), format_number(e.dS),
                        format_number(e.bound), format_number(e.sie_cap), e.support_flag ? "1" : "0"});
    }
  }

  for (const auto& [name, a] : observables) {
    result.integrated.emplace_back(name, integrated_report(traj, a, 1e-7 * options.tol_scale));
  }
  if (wants(config, "integrated")) {
    Json j;
    j["name"] = config.name;
    j["dim"] = config.dim;
    j["t_max"] = config.t_max;
    j["steps"] = config.steps;
    j["projections"] = traj.projections;
    Json obs = Json::object();
    for (const auto& [name, r] : result.integrated) obs[name] = Json::parse(to_json(r));
    j["observables"] = obs;
    const fs::path path = options.out_dir / (config.name + ".integrated.json");
    write_text(path, j.dump(2) + "\n");
    result.files.push_back(path);
  }
  return result;
}

std::optional<Fig2Init> parse_fig2_init(const std::string& token) {
  if (token == "z1") return Fig2Init::Z1;
  if (token == "diag") return Fig2Init::Diag;
  return std::nullopt;
}

std::string to_string(Fig2Init init) { return init == Fig2Init::Z1 ? "z1" : "diag"; }

ScenarioConfig fig2_config(double omega, double kappa, Fig2Init init, double t_max, std::size_t steps) {
  if (!(kappa >= 0.0)) throw ContractError("kappa must be non-negative");
  ScenarioConfig c;
  c.name = "fig2-" + to_string(init);
  c.dim = 2;
  if (init == Fig2Init::Z1) {
    c.initial_state.bloch = std::array<double, 3>{0.0, 0.0, 1.0};
  } else {
    const double r = 1.0 / std::sqrt(3.0);
    c.initial_state.bloch = std::array<double, 3>{r, r, r};
  }
  c.hamiltonian = HamiltonianSpec{(omega / 2.0) * pauli::y().matrix(), "constant"};
  // -kappa [sz, [sz, rho]] is the Lindblad channel sz at rate 2 kappa
  c.channels.push_back(ChannelSpec{pauli::z().matrix(), 2.0 * kappa});
  c.t_max = t_max;
  c.steps = steps;
  ObservableSpec sx;
  sx.name = "sx";
  sx.pauli = "sx";
  ObservableSpec sz;
  sz.name = "sz";
  sz.pauli = "sz";
  c.observables = {sx, sz};
  c.outputs = {"speed"};
  return c;
}

std::string to_json(const Fig2Summary& s) {
  Json j;
  j["omega"] = s.omega;
  j["kappa"] = s.kappa;
  j["init"] = to_string(s.init);
  j["t_max"] = s.t_max;
  j["steps"] = s.steps;
  Json obs = Json::array();
  for (const Fig2ObservableSummary& o : s.observables) {
    Json e;
    e["name"] = o.name;
    e["instants"] = o.instants;
    e["max_upper_gap"] = number(o.max_upper_gap);
    e["max_lower_gap"] = number(o.max_lower_gap);
    e["median_upper_gap"] = number(o.median_upper_gap);
    e["median_lower_gap"] = number(o.median_lower_gap);
    e["saturated_instants"] = o.saturated_instants;
    e["pattern_checked"] = o.pattern_checked;
    e["pattern_mismatches"] = o.pattern_mismatches;
    obs.push_back(e);
  }
  j["observables"] = obs;
  return j.dump(2);
}

Fig2Summary fig2_experiment(double omega, double kappa, Fig2Init init, double t_max, std::size_t steps,
                            const RunOptions& options) {
  const ScenarioConfig config = fig2_config(omega, kappa, init, t_max, steps);
  const ToleranceSet tol = tolerances_from(config);
  const Trajectory traj = evolve(build_initial_state(config, tol), build_generator(config), t_max, steps, tol);
  const auto observables = build_observables(config);

  ensure_dir(options.out_dir);
  Fig2Summary summary{omega, kappa, init, t_max, steps, {}, {}};
  CsvWriter csv(options.out_dir / (config.name + ".speed.csv"), speed_csv_header());
  summary.files.push_back(csv.path());

  std::vector<std::vector<double>> upper(observables.size()), lower(observables.size());
  summary.observables.resize(observables.size());
  for (std::size_t i = 0; i < observables.size(); ++i) summary.observables[i].name = observables[i].first;

  constexpr double kSaturated = 1e-7;
  constexpr double kComponent = 1e-6;
  for (const TrajectoryPoint& pt : traj.points) {
    const SpeedOperators ops = speed_operators(pt);
    for (std::size_t i = 0; i < observables.size(); ++i) {
      const auto& [name, a] = observables[i];
      const SpeedReport r =
          speed_report(split_observable(a, pt.frame), pt, ops, support_correction(pt, a), tol);
      check_speed_report(r, pt.t, options.tol_scale);
      csv.row(speed_csv_row(pt.t, name, r));

      Fig2ObservableSummary& o = summary.observables[i];
      const double up = r.bound_upper - std::abs(r.a_dot);
      const double lo = std::abs(r.a_dot) - r.bound_lower;
      upper[i].push_back(up);
      lower[i].push_back(lo);
      o.max_upper_gap = std::max(o.max_upper_gap, up);
      o.max_lower_gap = std::max(o.max_lower_gap, lo);
      ++o.instants;
      if (up < kSaturated || lo < kSaturated) ++o.saturated_instants;

      const SpeedOperatorBasis b = speed_operator_basis(ops, pt, &a);
      const double wc = b.alpha_coh * ops.F_coh;
      const double wi = b.alpha_inc * ops.F_inc;
      if (std::abs(wc) > kComponent && std::abs(wi) > kComponent) {
        ++o.pattern_checked;
        const bool agree = (wc > 0) == (wi > 0);
        const bool ok = agree ? (up < kSaturated && lo > kSaturated) : (lo < kSaturated && up > kSaturated);
        if (!ok) ++o.pattern_mismatches;
      }
    }
  }
  for (std::size_t i = 0; i < observables.size(); ++i) {
    summary.observables[i].median_upper_gap = median(upper[i]);
    summary.observables[i].median_lower_gap = median(lower[i]);
  }
  const fs::path path = options.out_dir / (config.name + ".summary.json");
  write_text(path, to_json(summary) + "\n");
  summary.files.push_back(path);
  return summary;
}

ErasureRun run_erasure(const ErasureParams& p, const RunOptions& options) {
  ErasureRun run;
  run.comparison = erasure_scenario(p.a, p.b, p.gamma, p.epsilon, p.t_max, p.steps);
  ensure_dir(options.out_dir);
  CsvWriter csv(options.out_dir / "erasure.csv",
                {"t", "z_inc", "x_inc", "z_enh", "x_enh", "rate_inc", "rate_enh"});
  const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const ErasureSample& s : run.comparison.samples) {
    csv.row({format_number(s.t), format_number(s.z_inc), format_number(s.x_inc), format_number(s.z_enh),
             format_number(s.x_enh), opt(s.rate_inc), opt(s.rate_enh)});
  }
  run.files.push_back(csv.path());

  const ErasureComparison& c = run.comparison;
  Json j;
  j["a"] = p.a;
  j["b"] = p.b;
  j["gamma"] = p.gamma;
  j["epsilon"] = p.epsilon;
  j["t_max"] = p.t_max;
  j["steps"] = p.steps;
  j["max_rate_error_inc"] = number(c.max_rate_error_inc);
  j["max_rate_error_enh"] = number(c.max_rate_error_enh);
  j["crossing_time"] = c.crossing_time ? Json(*c.crossing_time) : Json(nullptr);
  j["enhanced_dominates"] = c.enhanced_dominates;
  const fs::path path = options.out_dir / "erasure.summary.json";
  write_text(path, j.dump(2) + "\n");
  run.files.push_back(path);
  return run;
}

// ---------------------------------------------------------------------------
// envcheck

EnvcheckSummary envcheck(std::uint64_t seed, std::size_t scenarios, std::size_t instants, double t_max,
                         double tol_scale) {
  EnvcheckSummary s;
  s.seed = seed;
  s.scenarios = scenarios;
  s.instants = instants;
  s.min_inc_relative_gap = std::numeric_limits<double>::infinity();
  if (instants == 0) throw ContractError("envcheck needs at least one instant");
  Rng rng(seed);
  const Factorization dims{2, 2};
  const double slack = 1e-8 * tol_scale;
  constexpr std::size_t kSub = 4;

  for (std::size_t n = 0; n < scenarios; ++n) {
    JointHamiltonian h{dims, random_hermitian(2, rng), random_hermitian(2, rng), random_hermitian(4, rng)};
    const DensityMatrix rho_s = random_full_rank_state(2, rng);
    const DensityMatrix rho_e = random_full_rank_state(2, rng);
    const DensityMatrix joint0(HermitianOperator::hermitized(kron(rho_s.matrix(), rho_e.matrix())));
    const Trajectory traj = evolve(joint0, Generator::constant(h.total()), t_max, kSub * instants);

    std::optional<SpectralFrame> prev;
    for (std::size_t k = 1; k <= instants; ++k) {
      const TrajectoryPoint& pt = traj.points[k * kSub];
      const EnergyVarianceRecord r = energy_variance_check(pt, h, prev ? &*prev : nullptr, slack);
      prev = r.reduced_frame;
      ++s.checks;
      if (!r.coh_holds) {
        ++s.coh_violations;
        s.worst_coh_excess = std::max(s.worst_coh_excess, r.F_coh - 4.0 * r.var_h_sys);
      }
      if (!r.inc_holds) {
        ++s.inc_violations;
        s.worst_inc_excess = std::max(s.worst_inc_excess, r.F_inc - 4.0 * r.var_h_int);
      }
      if (!r.inc_strict) ++s.strict_violations;
      if (r.F_inc > 1e-9) {
        s.min_inc_relative_gap = std::min(s.min_inc_relative_gap, (4.0 * r.var_h_int - r.F_inc) / r.F_inc);
      }
      if (!r.var_h_eff) {
        ++s.eff_unavailable;
      } else if (!r.eff_holds) {
        ++s.eff_violations;
      }
    }
  }
  if (!std::isfinite(s.min_inc_relative_gap)) s.min_inc_relative_gap = 0.0;
  return s;
}

std::string to_json(const EnvcheckSummary& s) {
  Json j;
  j["seed"] = s.seed;
  j["scenarios"] = s.scenarios;
  j["instants"] = s.instants;
  j["checks"] = s.checks;
  j["coh_violations"] = s.coh_violations;
  j["worst_coh_excess"] = number(s.worst_coh_excess);
  j["inc_violations"] = s.inc_violations;
  j["worst_inc_excess"] = number(s.worst_inc_excess);
  j["strict_violations"] = s.strict_violations;
  j["min_inc_relative_gap"] = number(s.min_inc_relative_gap);
  j["eff_violations"] = s.eff_violations;
  j["eff_unavailable"] = s.eff_unavailable;
  j["ok"] = s.ok();
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// verify

namespace {

class InvariantBook {
 public:
  explicit InvariantBook(double tol_scale) : scale_(tol_scale) {}

  // Records `excess` (a residual, or lhs - rhs of an inequality) against `allowed`.
  void check(const std::string& name, double excess, double allowed) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      it = index_.emplace(name, stats_.size()).first;
      stats_.push_back(InvariantStat{name, 0, 0, -std::numeric_limits<double>::infinity(),
                                     -std::numeric_limits<double>::infinity()});
    }
    InvariantStat& s = stats_[it->second];
    const double bound = allowed * scale_;
    const double normalized = excess / bound;
    ++s.checks;
    if (!(excess <= bound)) {
      ++s.failures;
      if (std::isnan(excess)) {
        s.max_excess = s.max_normalized = std::numeric_limits<double>::infinity();
        return;
      }
    }
    s.max_excess = std::max(s.max_excess, excess);
    s.max_normalized = std::max(s.max_normalized, normalized);
  }

  // |lhs - rhs| <= abs_tol + rel_tol * max(|lhs|, |rhs|)
  void same(const std::string& name, double lhs, double rhs, double abs_tol, double rel_tol = 0.0) {
    check(name, std::abs(lhs - rhs), abs_tol + rel_tol * std::max(std::abs(lhs), std::abs(rhs)));
  }

  std::vector<InvariantStat> take() { return std::move(stats_); }

 private:
  double scale_;
  std::map<std::string, std::size_t> index_;
  std::vector<InvariantStat> stats_;
};

double trace_product(const Matrix& a, const Matrix& b) { return (a * b).trace().real(); }

Matrix commutator_drive(const HermitianOperator& h, const DensityMatrix& rho) {
  return -kI * (h.matrix() * rho.matrix() - rho.matrix() * h.matrix());
}

HermitianOperator norm_matched(const HermitianOperator& h, double norm) {
  const double n = operator_norm(h);
  return n > 0.0 ? h * (norm / n) : h;
}

void chain_invariants(InvariantBook& book, const SpeedReport& r) {
  const double s = 1e-9 * (1.0 + r.bound_cr);
  const double c = r.support_corr;
  const double a = std::abs(r.a_dot);
  book.check("chain.lower_le_speed", r.bound_lower - a - c, s);
  book.check("chain.speed_le_upper", a - r.bound_upper - c, s);
  book.check("chain.upper_le_loose", r.bound_upper - r.bound_upper_loose - c, s);
  book.check("chain.loose_le_cramer_rao", r.bound_upper_loose - r.bound_cr, s);
  book.check("chain.coh_component", std::abs(r.a_dot_coh) - r.bound_coh, s);
  book.check("chain.inc_component", std::abs(r.a_dot_inc) - r.bound_inc - c, s);
  book.check("speed.component_sum", std::abs(r.a_dot - r.a_dot_coh - r.a_dot_inc),
             1e-10 * (1.0 + a + std::abs(r.a_dot_coh) + std::abs(r.a_dot_inc)));
  book.check("ratio.at_least_one", 1.0 - r.ratio, 1e-12);
  if (r.bound_upper_loose > 0.0) {
    book.same("ratio.closed_form", r.ratio,
              tightness_ratio_closed_form(r.dA_coh, r.dA_inc, r.F_coh, r.F_inc), 1e-10);
  }
  const double rate_floor = 1e-10 * (1.0 + r.bound_cr);
  if (std::abs(r.a_dot) > rate_floor) book.check("time_info.total", 1.0 - r.tau_info, 1e-9);
  if (std::abs(r.a_dot_coh) > rate_floor) book.check("time_info.coh", 1.0 - r.tau_info_coh, 1e-9);
  if (std::abs(r.a_dot_inc) > rate_floor && c == 0.0) book.check("time_info.inc", 1.0 - r.tau_info_inc, 1e-9);
}

void verify_trial(InvariantBook& book, Index d, Rng& rng) {
  const ToleranceSet tol;
  const DensityMatrix rho = random_full_rank_state(d, rng);
  const Generator gen = random_generator(d, rng);
  const HermitianOperator a = random_hermitian(d, rng);
  const HermitianOperator b = random_hermitian(d, rng);
  const HermitianOperator drho = lindblad_derivative(rho, gen, 0.0);
  const TrajectoryPoint pt = make_point(0.0, rho, drho, tol);
  const SpectralFrame& f = pt.frame;
  const double drho_scale = 1.0 + max_abs(drho.matrix());

  // operator-core / dynamics
  book.check("frame.reconstruct", max_abs(f.reconstruct() - rho.matrix()), 1e-10);
  book.check("frame.unitary", max_abs(f.basis.adjoint() * f.basis - Matrix::Identity(d, d)), 1e-10);
  book.check("derivative.trace", std::abs(drho.matrix().trace()), 1e-10 * drho_scale);
  book.check("split.sum", max_abs(pt.coh.matrix() + pt.inc.matrix() - drho.matrix()), 1e-12 * drho_scale);
  book.check("split.coh_offdiagonal", f.to_frame(pt.coh.matrix()).diagonal().cwiseAbs().maxCoeff(),
             1e-10 * drho_scale);
  book.check("split.pdot_sum", std::abs(pt.pdot.sum()), 1e-10 * drho_scale);
  {
    SpectralFrame g = f;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    for (Index j = 0; j < d; ++j) g.basis.col(j) *= std::polar(1.0, phase(rng));
    const DerivativeSplit s = split_derivative(drho, g);
    book.check("split.gauge_independence",
               std::max(max_abs(s.coh.matrix() - pt.coh.matrix()), max_abs(s.inc.matrix() - pt.inc.matrix())),
               1e-10 * drho_scale);
  }

  // information
  const SpeedOperators ops = speed_operators(pt);
  const Matrix& r = rho.matrix();
  book.check("sld.reconstruct",
             max_abs(0.5 * (ops.L.matrix() * r + r * ops.L.matrix()) - drho.matrix()), 1e-9);
  book.check("sld.mean_zero", std::abs(trace_product(r, ops.L.matrix())), 1e-10 * (1.0 + std::sqrt(ops.F)));
  book.same("fisher.variance", ops.F, variance(rho, ops.L), 0.0, 1e-9);
  book.check("fisher.additivity", std::abs(ops.F - ops.F_coh - ops.F_inc), 1e-9 * std::max(1.0, ops.F));
  book.check("fisher.orthogonality", std::abs(sym_covariance(rho, ops.L_coh, ops.L_inc)), 1e-10);
  try {
    const EffectiveHamiltonian eff = effective_hamiltonian(pt.coh, f, tol.gap, tol.drive);
    book.check("effective_hamiltonian.reconstruct",
               max_abs(commutator_drive(eff.h, rho) - pt.coh.matrix()), 1e-9 * drho_scale);
  } catch (const DegenerateDriveError&) {
  }

  // observable split and speeds
  const ObservableSplit split = split_observable(a, f);
  const double a_scale = 1.0 + max_abs(a.matrix());
  book.check("observable.split_sum", max_abs(split.A_coh.matrix() + split.A_inc.matrix() - a.matrix()),
             1e-12 * a_scale);
  book.check("observable.coh_mean_zero", std::abs(rho.expectation(split.A_coh)), 1e-10 * a_scale);
  book.same("observable.variance", split.dA * split.dA, variance(rho, a), 1e-10, 1e-10);
  book.same("observable.variance_coh", split.dA_coh * split.dA_coh, variance(rho, split.A_coh), 1e-10, 1e-10);
  book.same("observable.variance_inc", split.dA_inc * split.dA_inc, variance(rho, split.A_inc), 1e-10, 1e-10);

  const SpeedReport rep = speed_report(split, pt, ops, support_correction(pt, a), tol);
  const double speed_scale = 1.0 + rep.bound_cr;
  book.check("speed.ehrenfest", std::abs(rep.a_dot - sym_covariance(rho, a, ops.L)), 1e-9 * speed_scale);
  chain_invariants(book, rep);

  {
    std::uniform_real_distribution<double> shift(-3.0, 3.0);
    const HermitianOperator as = a + HermitianOperator::identity(d) * shift(rng);
    const SpeedReport rs = speed_report(split_observable(as, f), pt, ops, support_correction(pt, as), tol);
    double worst = 0.0;
    for (const auto& [x, y] : {std::pair{rep.a_dot, rs.a_dot}, {rep.a_dot_coh, rs.a_dot_coh},
                              {rep.a_dot_inc, rs.a_dot_inc}, {rep.bound_cr, rs.bound_cr},
                              {rep.bound_upper, rs.bound_upper}, {rep.bound_lower, rs.bound_lower}}) {
      worst = std::max(worst, std::abs(x - y) / (1.0 + std::abs(x)));
    }
    book.check("observable.identity_shift", worst, 1e-10);
  }

  // saturating observables
  {
    const SpeedReport cr = speed_report(split_observable(ops.L, f), pt, ops, 0.0, tol);
    book.same("saturation.cramer_rao", std::abs(cr.a_dot), cr.bound_cr, 1e-8 * std::max(1.0, ops.F));
    const HermitianOperator up_a = ops.L_coh + ops.L_inc;
    const SpeedReport up = speed_report(split_observable(up_a, f), pt, ops, 0.0, tol);
    book.same("saturation.upper", std::abs(up.a_dot), up.bound_upper, 1e-8 * std::max(1.0, ops.F));
    const HermitianOperator lo_a = ops.L_coh - ops.L_inc;
    const SpeedReport lo = speed_report(split_observable(lo_a, f), pt, ops, 0.0, tol);
    book.same("saturation.lower", std::abs(lo.a_dot), lo.bound_lower, 1e-8 * std::max(1.0, ops.F));
  }

  // entropy
  {
    const EntropyRate e = entropy_rate_bound(pt, ops);
    book.check("entropy.rate_bound", std::abs(e.S_dot) - e.bound, 1e-9);
    book.check("entropy.spread_cap", e.dS - e.sie_cap, 1e-12);
  }

  // speed-operator basis
  {
    const SpeedOperatorBasis basis = speed_operator_basis(ops, pt, &a);
    std::vector<HermitianOperator> members;
    if (basis.has_coh) members.push_back(ops.L_coh * (1.0 / std::sqrt(ops.F_coh)));
    if (basis.has_inc) members.push_back(ops.L_inc * (1.0 / std::sqrt(ops.F_inc)));
    for (std::size_t i = 0; i < basis.still.size(); ++i) {
      if (!basis.still_degenerate[i]) members.push_back(basis.still[i]);
    }
    const std::size_t total = members.size() + static_cast<std::size_t>(std::count(
                                                   basis.still_degenerate.begin(), basis.still_degenerate.end(), true));
    book.check("basis.size", std::abs(static_cast<double>(total) - static_cast<double>(d * d)), 0.5);
    double worst_norm = 0.0;
    double worst_cov = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      worst_norm = std::max(worst_norm, std::abs(variance(rho, members[i]) - 1.0));
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        worst_cov = std::max(worst_cov, std::abs(sym_covariance(rho, members[i], members[j])));
      }
    }
    book.check("basis.normalization", worst_norm, 1e-9);
    book.check("basis.orthogonality", worst_cov, 1e-9);
    book.check("basis.residual_speed", basis.residual_speed, 1e-8 * speed_scale);
  }

  // covariance form
  {
    const double ab = sym_covariance(rho, a, b);
    const double cov_scale = 1.0 + std::abs(ab) + variance(rho, a) + variance(rho, b);
    book.check("covariance.symmetry", std::abs(ab - sym_covariance(rho, b, a)), 1e-12 * cov_scale);
    book.check("covariance.bilinearity",
               std::abs(sym_covariance(rho, a + b * 2.0, a) - variance(rho, a) - 2.0 * ab), 1e-10 * cov_scale);
  }

  // unitary drive: Braunstein-Caves on a mixed state, equality on a pure state
  {
    const HermitianOperator h = random_hermitian(d, rng);
    const TrajectoryPoint u =
        make_point(0.0, rho, HermitianOperator::hermitized(commutator_drive(h, rho)), tol);
    const SpeedOperators uo = speed_operators(u);
    const double var_h = variance(rho, h);
    book.check("unitary.fisher_le_energy_variance", uo.F - 4.0 * var_h, 1e-9 * std::max(1.0, 4.0 * var_h));

    const DensityMatrix psi = random_pure_state(d, rng);
    const TrajectoryPoint pu =
        make_point(0.0, psi, HermitianOperator::hermitized(commutator_drive(h, psi)), tol);
    const SpeedOperators po = speed_operators(pu);
    const double var_p = variance(psi, h);
    book.same("pure.fisher_energy_variance", po.F_coh, 4.0 * var_p, 0.0, 1e-9);
  }

  // POVMs
  {
    const std::vector<HermitianOperator> povm = random_povm(d, d + 2, rng);
    const double fp = classical_fisher_povm(pt, povm, tol);
    book.check("povm.le_quantum_fisher", fp - ops.F, 1e-9 * std::max(1.0, ops.F));
    std::vector<HermitianOperator> eig;
    for (Index j = 0; j < d; ++j) {
      eig.push_back(HermitianOperator::hermitized(f.basis.col(j) * f.basis.col(j).adjoint()));
    }
    book.same("povm.eigenbasis_is_incoherent", classical_fisher_povm(pt, eig, tol), ops.F_inc,
              1e-9 * std::max(1.0, ops.F_inc));
  }

  // speedup synthesis
  try {
    std::uniform_real_distribution<double> lam(0.5, 2.0);
    const int dir = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
    const double lambda = lam(rng);
    const SpeedupHamiltonian sh = synthesize_speedup(f, SpeedupPolicy::with_lambda(a, lambda, dir), tol);
    const TrajectoryPoint sp =
        make_point(0.0, rho, HermitianOperator::hermitized(commutator_drive(sh.h, rho)), tol);
    const SpeedOperators so = speed_operators(sp);
    const Matrix target = dir * lambda * split.A_coh.matrix();
    const double denom = max_abs(target);
    if (denom > 1e-12) {
      book.check("speedup.proportional", max_abs(so.L_coh.matrix() - target) / denom, 1e-9);
    }
    const double achieved = trace_product(a.matrix(), commutator_drive(sh.h, rho));
    book.same("speedup.rate", achieved, dir * lambda * split.dA_coh * split.dA_coh, 1e-9 * speed_scale, 1e-9);

    const SpeedupHamiltonian capped = synthesize_speedup(f, SpeedupPolicy::with_norm_cap(a, 1.0), tol);
    book.same("speedup.norm_cap", operator_norm(capped.h), 1.0, 1e-9);
    const double best = trace_product(a.matrix(), commutator_drive(capped.h, rho));
    const double budget = speed_operators(make_point(
        0.0, rho, HermitianOperator::hermitized(commutator_drive(capped.h, rho)), tol)).F_coh;
    double worst_norm = -std::numeric_limits<double>::infinity();
    double worst_fisher = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10; ++k) {
      const HermitianOperator other = norm_matched(random_hermitian(d, rng), 1.0);
      const Matrix drive = commutator_drive(other, rho);
      const double rate = trace_product(a.matrix(), drive);
      worst_norm = std::max(worst_norm, rate - best);
      // Same competitor rescaled to the synthesized drive's coherent Fisher information.
      const double f_other =
          speed_operators(make_point(0.0, rho, HermitianOperator::hermitized(drive), tol)).F_coh;
      if (f_other > 0.0) worst_fisher = std::max(worst_fisher, rate * std::sqrt(budget / f_other) - best);
    }
    book.check("speedup.optimality_operator_norm", worst_norm, 1e-8);
    if (std::isfinite(worst_fisher)) book.check("speedup.optimality_fixed_fisher", worst_fisher, 1e-8 * speed_scale);
  } catch (const UnattainableSaturationError&) {
  }

  // Bures geometry
  {
    const DensityMatrix s2 = random_full_rank_state(d, rng);
    const DensityMatrix s3 = random_full_rank_state(d, rng);
    book.check("bures.triangle", bures_distance(rho, s3) - bures_distance(rho, s2) - bures_distance(s2, s3), 1e-9);
    book.same("bures.symmetry", bures_distance(rho, s2), bures_distance(s2, rho), 1e-9);
  }
}

}  // namespace

bool VerifySummary::ok() const {
  if (errors != 0) return false;
  for (const InvariantStat& s : invariants) {
    if (s.failures != 0) return false;
  }
  return true;
}

const InvariantStat* VerifySummary::find(const std::string& name) const {
  for (const InvariantStat& s : invariants) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

VerifySummary verify_sweep(std::uint64_t seed, std::size_t trials, Index dim_lo, Index dim_hi, double tol_scale) {
  if (dim_lo < 2 || dim_hi < dim_lo) throw ContractError("dimension range must satisfy 2 <= lo <= hi");
  if (!(tol_scale > 0.0)) throw ContractError("tolerance scale must be positive");
  VerifySummary summary;
  summary.seed = seed;
  summary.trials = trials;
  summary.dim_lo = dim_lo;
  summary.dim_hi = dim_hi;
  summary.tol_scale = tol_scale;
  InvariantBook book(tol_scale);
  Rng rng(seed);
  std::uniform_int_distribution<Index> dim(dim_lo, dim_hi);
  for (std::size_t n = 0; n < trials; ++n) {
    // One independent stream per trial so a failing trial can be replayed alone.
    Rng trial_rng(rng());
    const Index d = dim(trial_rng);
    try {
      verify_trial(book, d, trial_rng);
    } catch (const Error& e) {
      ++summary.errors;
      if (summary.error_messages.size() < 10) {
        summary.error_messages.push_back("trial " + std::to_string(n) + ": " + e.what());
      }
    }
  }
  summary.invariants = book.take();
  return summary;
}

std::string to_json(const VerifySummary& s) {
  Json j;
  j["seed"] = s.seed;
  j["trials"] = s.trials;
  j["dims"] = {s.dim_lo, s.dim_hi};
  j["tol_scale"] = s.tol_scale;
  Json inv = Json::array();
  for (const InvariantStat& st : s.invariants) {
    Json e;
    e["name"] = st.name;
    e["checks"] = st.checks;
    e["failures"] = st.failures;
    e["max_excess"] = number(st.max_excess);
    e["max_normalized"] = number(st.max_normalized);
    inv.push_back(e);
  }
  j["invariants"] = inv;
  j["errors"] = s.errors;
  j["error_messages"] = s.error_messages;
  j["ok"] = s.ok();
  return j.dump(2);
}

}  // namespace qsl
