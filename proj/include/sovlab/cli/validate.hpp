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
#include <string>
#include <vector>

#include "sovlab/cli/emit.hpp"

namespace sovlab::cli {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Property suite at small dimensions. Includes the mutation check (a
/// sign-flipped SOV source must fail the residual test) and a sweep of the
/// Monte Carlo consistency check over five seeds derived from base_seed.
std::vector<CheckResult> run_property_suite(std::uint64_t base_seed, unsigned threads);

Table checks_table(const std::vector<CheckResult>& checks);

}  // namespace sovlab::cli
