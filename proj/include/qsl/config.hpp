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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsl/operators.hpp"

namespace qsl {

struct InitialStateSpec {
  std::optional<std::array<double, 3>> bloch;
  Matrix matrix;  // used when bloch is absent
};

struct HamiltonianSpec {
  Matrix matrix;
  std::string schedule = "constant";  // "constant" or "ramp(<rate>)": H(t) = rate * t * matrix
};

struct ChannelSpec {
  Matrix matrix;
  double rate = 0.0;
};

struct ObservableSpec {
  std::string name;
  std::optional<std::string> pauli;  // "sx", "sy" or "sz"
  Matrix matrix;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Index dim = 2;
  InitialStateSpec initial_state;
  std::optional<HamiltonianSpec> hamiltonian;
  std::vector<ChannelSpec> channels;
  double t_max = 1.0;
  std::size_t steps = 100;
  std::vector<ObservableSpec> observables;
  std::vector<std::string> outputs{"speed", "integrated"};
  std::map<std::string, double> tolerances;  // overrides by ToleranceSet field name
  std::uint64_t seed = 0;
};

// Parses and validates; errors carry the offending field and its line.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string emit_config(const ScenarioConfig& config);

// Schedule factor f(t) multiplying the Hamiltonian matrix.
double schedule_factor(const std::string& schedule, double t);
ToleranceSet tolerances_from(const ScenarioConfig& config);
HermitianOperator pauli_by_name(const std::string& token);

}  // namespace qsl
