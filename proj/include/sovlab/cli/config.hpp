// Copyright 2026 The sovlab Authors
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
#include <map>
#include <string>
#include <vector>

#include "sovlab/operator.hpp"

namespace sovlab::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Experiment { quantum_sov, otoc, min_state, classical_lyapunov, phase_diagram, validate };

Experiment parse_experiment(const std::string& name);
std::string experiment_name(Experiment e);

enum class ParamKind { real, integer, seed, text };

struct ParamSpec {
  std::string key;
  ParamKind kind;
  std::string fallback;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::string> choices;  // text parameters only
  std::string doc;
  // Excluded from the run identity (output location, worker count).
  bool runtime_only = false;
};

// Every accepted key, in documentation order.
const std::vector<ParamSpec>& schema();

/// Flat key=value run configuration. Values are validated on assignment and
/// stored in canonical form, so equal configurations print identically.
class RunConfig {
 public:
  explicit RunConfig(Experiment e);

  Experiment experiment() const { return experiment_; }

  // Throws ConfigError for unknown keys, malformed values and range
  // violations. `origin` is quoted in the message.
  void set(const std::string& key, const std::string& value,
           const std::string& origin = "flag");
  // Lines are `key = value`; '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  // Cross-field checks; throws ConfigError.
  void validate() const;

  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::uint64_t seed() const;
  const std::string& text(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  Experiment experiment_;
  std::map<std::string, std::string> values_;
};

}  // namespace sovlab::cli
