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

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sovlab/cli/config.hpp"

namespace sovlab::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string name;  // file stem in csv mode
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct RunResult {
  std::vector<Table> tables;
};

inline constexpr const char* kManifestFile = "run_manifest.json";

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_cell(const Cell& c);

// RFC 4180: header row, CRLF line ends, fields quoted when they contain a
// comma, quote, CR or LF. An empty table yields the header alone.
std::string to_csv(const Table& t);

std::string sha256_hex(std::string_view bytes);

// Hash of the canonical configuration minus runtime-only keys. Output files
// carry it so they can be matched to their manifest.
std::string run_id(const RunConfig& cfg);

nlohmann::json to_structured(const RunResult& r, const RunConfig& cfg);
// Inverse of to_structured for the tables; null cells read back as NaN.
RunResult from_structured(const nlohmann::json& j);

struct EmitReport {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

/// Writes the result tables in the configured format, then the manifest
/// listing every file with its SHA-256. Throws Error on unwritable paths.
EmitReport emit(const RunResult& r, const RunConfig& cfg, double wall_seconds,
                unsigned threads);

}  // namespace sovlab::cli
