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

#include "qsl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qsl {

using Json = nlohmann::ordered_json;

namespace {

int line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key": in the source, 0 if absent.
int line_of_key(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_at(text, pos);
}

struct Parser {
  const std::string& text;

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    const std::size_t cut = field.find_last_of(".]");
    std::string key = field.substr(cut == std::string::npos ? 0 : cut + 1);
    if (key.empty()) key = field.substr(0, field.find_first_of(".["));
    throw ConfigError(field, message, line_of_key(text, key));
  }

  double number(const Json& j, const std::string& field) const {
    if (!j.is_number()) fail(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(field, "expected a finite number");
    return v;
  }

  Matrix matrix(const Json& j, Index dim, const std::string& field) const {
    if (!j.is_array() || static_cast<Index>(j.size()) != dim) {
      fail(field, "expected " + std::to_string(dim) + " rows");
    }
    Matrix m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
      const Json& row = j[static_cast<std::size_t>(r)];
      const std::string rf = field + "[" + std::to_string(r) + "]";
      if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
        fail(rf, "expected " + std::to_string(dim) + " entries");
      }
      for (Index c = 0; c < dim; ++c) {
        const Json& e = row[static_cast<std::size_t>(c)];
        const std::string ef = rf + "[" + std::to_string(c) + "]";
        if (e.is_number()) {
          m(r, c) = Complex(number(e, ef), 0.0);
        } else if (e.is_array() && e.size() == 2) {
          m(r, c) = Complex(number(e[0], ef), number(e[1], ef));
        } else {
          fail(ef, "expected a number or an [re, im] pair");
        }
      }
    }
    return m;
  }

  void hermitian(const Matrix& m, const std::string& field) const {
    if (max_abs(m - m.adjoint()) > ToleranceSet{}.hermiticity) fail(field, "matrix is not Hermitian");
  }

  void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& field) const {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!allowed.count(it.key())) {
        fail(field.empty() ? it.key() : field + "." + it.key(), "unknown field");
      }
    }
  }
};

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::regex& ramp_pattern() {
  static const std::regex re(R"(^ramp\(\s*([-+0-9.eE]+)\s*\)$)");
  return re;
}

double* tolerance_slot(ToleranceSet& t, const std::string& key) {
  if (key == "hermiticity") return &t.hermiticity;
  if (key == "trace") return &t.trace;
  if (key == "psd") return &t.psd;
  if (key == "rank") return &t.rank;
  if (key == "gap") return &t.gap;
  if (key == "degeneracy") return &t.degeneracy;
  if (key == "continuity") return &t.continuity;
  if (key == "divergence") return &t.divergence;
  if (key == "drive") return &t.drive;
  if (key == "povm") return &t.povm;
  if (key == "zero_rate") return &t.zero_rate;
  return nullptr;
}

}  // namespace

double schedule_factor(const std::string& schedule, double t) {
  if (schedule == "constant") return 1.0;
  std::smatch m;
  if (std::regex_match(schedule, m, ramp_pattern())) return std::stod(m[1].str()) * t;
  throw ContractError("unknown schedule '" + schedule + "'");
}

ToleranceSet tolerances_from(const ScenarioConfig& config) {
  ToleranceSet t;
  for (const auto& [key, value] : config.tolerances) {
    double* slot = tolerance_slot(t, key);
    if (!slot) throw ConfigError("tolerances." + key, "unknown tolerance");
    *slot = value;
  }
  return t;
}

HermitianOperator pauli_by_name(const std::string& token) {
  if (token == "sx") return pauli::x();
  if (token == "sy") return pauli::y();
  if (token == "sz") return pauli::z();
  throw ContractError("unknown Pauli token '" + token + "'");
}

ScenarioConfig parse_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", e.what(), line_at(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  const Parser p{text};
  if (!root.is_object()) p.fail("", "top level must be an object");
  p.only_keys(root, {"name", "dim", "initial_state", "hamiltonian", "channels", "t_max", "steps",
                     "observables", "outputs", "tolerances", "seed"},
              "");

  ScenarioConfig c;
  if (root.contains("name")) {
    if (!root["name"].is_string() || root["name"].get<std::string>().empty()) {
      p.fail("name", "expected a non-empty string");
    }
    c.name = root["name"].get<std::string>();
    if (c.name.find_first_of("/\\") != std::string::npos) p.fail("name", "name must not contain path separators");
  }
  if (!root.contains("dim") || !root["dim"].is_number_integer() || root["dim"].get<long long>() < 1 ||
      root["dim"].get<long long>() > 64) {
    p.fail("dim", "expected an integer between 1 and 64");
  }
  c.dim = root["dim"].get<long long>();

  if (!root.contains("initial_state") || !root["initial_state"].is_object()) {
    p.fail("initial_state", "expected an object with 'bloch' or 'matrix'");
  }
  const Json& init = root["initial_state"];
  p.only_keys(init, {"bloch", "matrix"}, "initial_state");
  if (init.contains("bloch") == init.contains("matrix")) {
    p.fail("initial_state", "give exactly one of 'bloch' and 'matrix'");
  }
  if (init.contains("bloch")) {
    if (c.dim != 2) p.fail("initial_state.bloch", "Bloch vectors need dim = 2");
    const Json& b = init["bloch"];
    if (!b.is_array() || b.size() != 3) p.fail("initial_state.bloch", "expected [x, y, z]");
    std::array<double, 3> v{};
    for (std::size_t i = 0; i < 3; ++i) v[i] = p.number(b[i], "initial_state.bloch");
    if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] > 1.0 + 1e-10) {
      p.fail("initial_state.bloch", "Bloch vector longer than 1");
    }
    c.initial_state.bloch = v;
  } else {
    c.initial_state.matrix = p.matrix(init["matrix"], c.dim, "initial_state.matrix");
    p.hermitian(c.initial_state.matrix, "initial_state.matrix");
    try {
      DensityMatrix check(c.initial_state.matrix);
    } catch (const Error& e) {
      p.fail("initial_state.matrix", e.what());
    }
  }

  if (root.contains("hamiltonian")) {
    const Json& h = root["hamiltonian"];
    if (!h.is_object() || !h.contains("matrix")) p.fail("hamiltonian", "expected an object with 'matrix'");
    p.only_keys(h, {"matrix", "schedule"}, "hamiltonian");
    HamiltonianSpec spec;
    spec.matrix = p.matrix(h["matrix"], c.dim, "hamiltonian.matrix");
    p.hermitian(spec.matrix, "hamiltonian.matrix");
    if (h.contains("schedule")) {
      if (!h["schedule"].is_string()) p.fail("hamiltonian.schedule", "expected a string");
      spec.schedule = h["schedule"].get<std::string>();
      if (spec.schedule != "constant" && !std::regex_match(spec.schedule, ramp_pattern())) {
        p.fail("hamiltonian.schedule", "expected \"constant\" or \"ramp(<rate>)\"");
      }
    }
    c.hamiltonian = spec;
  }

  if (root.contains("channels")) {
    if (!root["channels"].is_array()) p.fail("channels", "expected an array");
    for (std::size_t i = 0; i < root["channels"].size(); ++i) {
      const Json& ch = root["channels"][i];
      const std::string f = "channels[" + std::to_string(i) + "]";
      if (!ch.is_object() || !ch.contains("matrix") || !ch.contains("rate")) {
        p.fail(f, "expected an object with 'matrix' and 'rate'");
      }
      p.only_keys(ch, {"matrix", "rate"}, f);
      ChannelSpec spec;
      spec.matrix = p.matrix(ch["matrix"], c.dim, f + ".matrix");
      spec.rate = p.number(ch["rate"], f + ".rate");
      if (spec.rate < 0.0) p.fail(f + ".rate", "rate must be nonnegative");
      c.channels.push_back(std::move(spec));
    }
  }

  if (!root.contains("t_max")) p.fail("t_max", "missing");
  c.t_max = p.number(root["t_max"], "t_max");
  if (!(c.t_max > 0.0)) p.fail("t_max", "must be positive");
  if (!root.contains("steps") || !root["steps"].is_number_integer() || root["steps"].get<long long>() < 2) {
    p.fail("steps", "expected an integer >= 2");
  }
  c.steps = static_cast<std::size_t>(root["steps"].get<long long>());

  if (root.contains("observables")) {
    if (!root["observables"].is_array()) p.fail("observables", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < root["observables"].size(); ++i) {
      const Json& o = root["observables"][i];
      const std::string f = "observables[" + std::to_string(i) + "]";
      if (!o.is_object() || !o.contains("name") || !o["name"].is_string()) {
        p.fail(f, "expected an object with a string 'name'");
      }
      p.only_keys(o, {"name", "pauli", "matrix"}, f);
      ObservableSpec spec;
      spec.name = o["name"].get<std::string>();
      if (spec.name.empty() || spec.name.find_first_of(",\n\"") != std::string::npos) {
        p.fail(f + ".name", "names must be non-empty and free of commas, quotes and newlines");
      }
      if (!names.insert(spec.name).second) p.fail(f + ".name", "duplicate observable name");
      if (o.contains("pauli") == o.contains("matrix")) p.fail(f, "give exactly one of 'pauli' and 'matrix'");
      if (o.contains("pauli")) {
        if (c.dim != 2) p.fail(f + ".pauli", "Pauli tokens need dim = 2");
        if (!o["pauli"].is_string()) p.fail(f + ".pauli", "expected \"sx\", \"sy\" or \"sz\"");
        const std::string tok = o["pauli"].get<std::string>();
        if (tok != "sx" && tok != "sy" && tok != "sz") p.fail(f + ".pauli", "expected \"sx\", \"sy\" or \"sz\"");
        spec.pauli = tok;
      } else {
        spec.matrix = p.matrix(o["matrix"], c.dim, f + ".matrix");
        p.hermitian(spec.matrix, f + ".matrix");
      }
      c.observables.push_back(std::move(spec));
    }
  }

  if (root.contains("outputs")) {
    if (!root["outputs"].is_array()) p.fail("outputs", "expected an array");
    c.outputs.clear();
    for (const Json& o : root["outputs"]) {
      if (!o.is_string()) p.fail("outputs", "expected strings");
      const std::string kind = o.get<std::string>();
      if (kind != "speed" && kind != "integrated" && kind != "entropy" && kind != "basis") {
        p.fail("outputs", "unknown output kind '" + kind + "'");
      }
      c.outputs.push_back(kind);
    }
  }

  if (root.contains("tolerances")) {
    if (!root["tolerances"].is_object()) p.fail("tolerances", "expected an object");
    ToleranceSet probe;
    for (auto it = root["tolerances"].begin(); it != root["tolerances"].end(); ++it) {
      if (!tolerance_slot(probe, it.key())) p.fail("tolerances." + it.key(), "unknown tolerance");
      const double v = p.number(it.value(), "tolerances." + it.key());
      if (!(v > 0.0)) p.fail("tolerances." + it.key(), "must be positive");
      c.tolerances[it.key()] = v;
    }
  }

  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned() && !(root["seed"].is_number_integer() && root["seed"].get<long long>() >= 0)) {
      p.fail("seed", "expected a nonnegative integer");
    }
    c.seed = root["seed"].get<std::uint64_t>();
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ScenarioConfig& c) {
  Json root;
  root["name"] = c.name;
  root["dim"] = c.dim;
  Json init;
  if (c.initial_state.bloch) {
    init["bloch"] = Json::array({(*c.initial_state.bloch)[0], (*c.initial_state.bloch)[1], (*c.initial_state.bloch)[2]});
  } else {
    init["matrix"] = matrix_json(c.initial_state.matrix);
  }
  root["initial_state"] = init;
  if (c.hamiltonian) {
    Json h;
    h["matrix"] = matrix_json(c.hamiltonian->matrix);
    h["schedule"] = c.hamiltonian->schedule;
    root["hamiltonian"] = h;
  }
  Json channels = Json::array();
  for (const auto& ch : c.channels) {
    Json j;
    j["matrix"] = matrix_json(ch.matrix);
    j["rate"] = ch.rate;
    channels.push_back(j);
  }
  root["channels"] = channels;
  root["t_max"] = c.t_max;
  root["steps"] = c.steps;
  Json obs = Json::array();
  for (const auto& o : c.observables) {
    Json j;
    j["name"] = o.name;
    if (o.pauli) {
      j["pauli"] = *o.pauli;
    } else {
      j["matrix"] = matrix_json(o.matrix);
    }
    obs.push_back(j);
  }
  root["observables"] = obs;
  root["outputs"] = c.outputs;
  if (!c.tolerances.empty()) {
    Json t = Json::object();
    for (const auto& [k, v] : c.tolerances) t[k] = v;
    root["tolerances"] = t;
  }
  root["seed"] = c.seed;
  return root.dump(2) + "\n";
}

}  // namespace qsl
