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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsl {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition broken by the caller (dimension mismatch, negative rate, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Matrix that should be a state or observable but is not (within tolerance).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

class IntegrationDivergedError : public Error {
 public:
  IntegrationDivergedError(std::size_t step, double min_eigenvalue)
      : Error("integration diverged at step " + std::to_string(step) +
              ": minimum eigenvalue " + std::to_string(min_eigenvalue)),
        step_(step),
        min_eigenvalue_(min_eigenvalue) {}
  std::size_t step() const { return step_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  std::size_t step_;
  double min_eigenvalue_;
};

class DegenerateDriveError : public Error {
 public:
  using Error::Error;
};

class SingularOutcomeError : public Error {
 public:
  using Error::Error;
};

class UnattainableSaturationError : public Error {
 public:
  using Error::Error;
};

// A bound that must hold by construction came out violated.
class BoundViolationError : public Error {
 public:
  BoundViolationError(const std::string& what, double t)
      : Error(what + " (t = " + std::to_string(t) + ")"), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

// Two independent routes to the same number disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message, int line = 0)
      : Error(format(field, message, line)), field_(field), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& message, int line) {
    std::string out = "config";
    if (line > 0) out += ":" + std::to_string(line);
    if (!field.empty()) out += ": field '" + field + "'";
    return out + ": " + message;
  }
  std::string field_;
  int line_;
};

}  // namespace qsl
