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

#include <iosfwd>
#include <vector>

#include "sovlab/cli/config.hpp"
#include "sovlab/cli/emit.hpp"
#include "sovlab/spin_algebra.hpp"
#include "sovlab/superop.hpp"

namespace sovlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitNonConvergence = 4;

struct QuantumModel {
  spin::SpinSpec spin;
  HermitianOperator h0;
  HermitianOperator jump;
  HermitianOperator observable;
  superop::LindbladSpec lindblad;
};

// sLMG from S, omega, gamma; the noise couples to H0 unless `jump` names a
// spin component.
QuantumModel build_model(const RunConfig& cfg);

// Geometric grid t_min..t_max or uniform grid 0..t_max, n_times points.
std::vector<double> time_grid(const RunConfig& cfg, bool linear);

struct ExperimentOutcome {
  RunResult result;
  int exit_code = kExitOk;
  std::string message;  // reason for a non-zero exit_code
};

ExperimentOutcome run_experiment(const RunConfig& cfg, std::ostream& log);

/// Runs, emits and maps failures onto exit codes: 2 configuration,
/// 3 numerical, 4 non-convergence, 1 anything else. Errors are reported on
/// `err` as a one-line JSON object.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace sovlab::cli
