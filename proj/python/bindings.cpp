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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <tuple>
#include <vector>

#include "qsl/experiments.hpp"
#include "qsl/geometry.hpp"
#include "qsl/speedup.hpp"

namespace py = pybind11;
using namespace qsl;

namespace {

using ChannelList = std::vector<std::tuple<double, Matrix>>;

Generator make_generator(const Matrix& h, const ChannelList& channels) {
  std::vector<LindbladChannel> out;
  for (const auto& [rate, jump] : channels) out.push_back({rate, jump});
  return Generator::constant(HermitianOperator(h), out);
}

TrajectoryPoint point_of(const Matrix& rho, const Matrix& drho) {
  return make_point(0.0, DensityMatrix(rho), HermitianOperator(drho, 1e-10));
}

py::dict report_dict(const SpeedReport& r) {
  py::dict d;
  d["a_dot"] = r.a_dot;
  d["a_dot_coh"] = r.a_dot_coh;
  d["a_dot_inc"] = r.a_dot_inc;
  d["dA"] = r.dA;
  d["dA_coh"] = r.dA_coh;
  d["dA_inc"] = r.dA_inc;
  d["F"] = r.F;
  d["F_coh"] = r.F_coh;
  d["F_inc"] = r.F_inc;
  d["bound_cr"] = r.bound_cr;
  d["bound_coh"] = r.bound_coh;
  d["bound_inc"] = r.bound_inc;
  d["bound_upper"] = r.bound_upper;
  d["bound_upper_loose"] = r.bound_upper_loose;
  d["bound_lower"] = r.bound_lower;
  d["ratio"] = r.ratio;
  d["tau_a"] = r.tau_a;
  d["tau_coh"] = r.tau_coh;
  d["tau_inc"] = r.tau_inc;
  d["support_corr"] = r.support_corr;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qsl, m) {
  m.doc() = "Coherent and incoherent speed limits for observables of open quantum systems.";

  auto base = py::register_exception<Error>(m, "QslError", PyExc_RuntimeError);
  py::register_exception<InvalidStateError>(m, "InvalidStateError", base.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<BoundViolationError>(m, "BoundViolationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IntegrationDivergedError>(m, "IntegrationDivergedError", base.ptr());

  m.def("pauli", [](const std::string& name) { return pauli_by_name(name).matrix(); }, py::arg("name"),
        "Pauli matrix for 'sx', 'sy' or 'sz'.");

  m.def(
      "lindblad_derivative",
      [](const Matrix& rho, const Matrix& h, const ChannelList& channels, double t) {
        return lindblad_derivative(DensityMatrix(rho), make_generator(h, channels), t).matrix();
      },
      py::arg("rho"), py::arg("hamiltonian"), py::arg("channels") = ChannelList{}, py::arg("t") = 0.0,
      "channels is a list of (rate, jump) pairs.");

  m.def(
      "spectral_decompose",
      [](const Matrix& rho) {
        const SpectralFrame f = spectral_decompose(DensityMatrix(rho));
        return std::make_tuple(RealVector(f.probabilities), Matrix(f.basis));
      },
      py::arg("rho"), "Descending eigenvalues and phase-fixed eigenvectors (as columns).");

  m.def(
      "split_derivative",
      [](const Matrix& rho, const Matrix& drho) {
        const TrajectoryPoint pt = point_of(rho, drho);
        return std::make_tuple(pt.coh.matrix(), pt.inc.matrix());
      },
      py::arg("rho"), py::arg("drho"));

  m.def(
      "speed_operators",
      [](const Matrix& rho, const Matrix& drho) {
        const SpeedOperators ops = speed_operators(point_of(rho, drho));
        py::dict d;
        d["L"] = ops.L.matrix();
        d["L_coh"] = ops.L_coh.matrix();
        d["L_inc"] = ops.L_inc.matrix();
        d["F"] = ops.F;
        d["F_coh"] = ops.F_coh;
        d["F_inc"] = ops.F_inc;
        return d;
      },
      py::arg("rho"), py::arg("drho"));

  m.def(
      "speed_report",
      [](const Matrix& rho, const Matrix& drho, const Matrix& a) {
        const TrajectoryPoint pt = point_of(rho, drho);
        const HermitianOperator obs(a);
        return report_dict(
            speed_report(split_observable(obs, pt.frame), pt, speed_operators(pt), support_correction(pt, obs)));
      },
      py::arg("rho"), py::arg("drho"), py::arg("observable"),
      "All speeds, spreads, Fisher informations and bounds for one observable at one instant.");

  m.def("tightness_ratio_closed_form", &tightness_ratio_closed_form, py::arg("dA_coh"), py::arg("dA_inc"),
        py::arg("F_coh"), py::arg("F_inc"));

  m.def(
      "evolve",
      [](const Matrix& rho0, const Matrix& h, const ChannelList& channels, double t_max, std::size_t steps) {
        const Trajectory traj = evolve(DensityMatrix(rho0), make_generator(h, channels), t_max, steps);
        std::vector<double> times;
        std::vector<Matrix> states;
        for (const TrajectoryPoint& p : traj.points) {
          times.push_back(p.t);
          states.push_back(p.rho.matrix());
        }
        return std::make_tuple(times, states);
      },
      py::arg("rho0"), py::arg("hamiltonian"), py::arg("channels") = ChannelList{}, py::arg("t_max"),
      py::arg("steps"));

  m.def("fidelity", [](const Matrix& a, const Matrix& b) { return fidelity(DensityMatrix(a), DensityMatrix(b)); });
  m.def("bures_distance",
        [](const Matrix& a, const Matrix& b) { return bures_distance(DensityMatrix(a), DensityMatrix(b)); });
  m.def("bures_angle", [](const Matrix& a, const Matrix& b) { return bures_angle(DensityMatrix(a), DensityMatrix(b)); });

  m.def(
      "speedup_hamiltonian",
      [](const Matrix& rho, const Matrix& a, std::optional<double> lambda, std::optional<double> norm_cap,
         int direction) {
        if (lambda.has_value() == norm_cap.has_value()) {
          throw ContractError("give exactly one of lambda and norm_cap");
        }
        const HermitianOperator obs(a);
        const SpeedupPolicy policy = lambda ? SpeedupPolicy::with_lambda(obs, *lambda, direction)
                                            : SpeedupPolicy::with_norm_cap(obs, *norm_cap, direction);
        return speedup_hamiltonian(spectral_decompose(DensityMatrix(rho)), policy).matrix();
      },
      py::arg("rho"), py::arg("observable"), py::kw_only(), py::arg("lambda_") = py::none(),
      py::arg("norm_cap") = py::none(), py::arg("direction") = 1);

  m.def(
      "run_config",
      [](const std::string& path, const std::filesystem::path& out_dir, double tol_scale) {
        return run_scenario(load_config(path), RunOptions{out_dir, tol_scale}).files;
      },
      py::arg("path"), py::arg("out_dir"), py::arg("tol_scale") = 1.0);

  m.def(
      "fig2",
      [](double omega, double kappa, const std::string& init, double t_max, std::size_t steps,
         const std::filesystem::path& out_dir) {
        const auto which = parse_fig2_init(init);
        if (!which) throw ContractError("init must be 'z1' or 'diag'");
        return to_json(fig2_experiment(omega, kappa, *which, t_max, steps, RunOptions{out_dir, 1.0}));
      },
      py::arg("omega") = 1.0, py::arg("kappa") = 0.1, py::arg("init") = "z1", py::arg("t_max") = 10.0,
      py::arg("steps") = 4000, py::arg("out_dir") = ".");

  m.def(
      "verify",
      [](std::uint64_t seed, std::size_t trials, Index dim_lo, Index dim_hi, double tol_scale) {
        py::gil_scoped_release release;
        return to_json(verify_sweep(seed, trials, dim_lo, dim_hi, tol_scale));
      },
      py::arg("seed") = 0, py::arg("trials") = 100, py::arg("dim_lo") = 2, py::arg("dim_hi") = 8,
      py::arg("tol_scale") = 1.0);
}
