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

#include "sovlab/cli/emit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <openssl/evp.h>

namespace sovlab::cli {

namespace fs = std::filesystem;

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error("table " + name + ": row has " + std::to_string(row.size()) +
                " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, r.ptr);
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + p.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error("failed writing " + p.string());
}

nlohmann::json config_json(const RunConfig& cfg, bool with_runtime) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& p : schema()) {
    if (p.runtime_only && !with_runtime) continue;
    j[p.key] = cfg.values().at(p.key);
  }
  return j;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(t.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(format_cell(row[i]));
    }
    out += "\r\n";
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::string run_id(const RunConfig& cfg) {
  nlohmann::json j;
  j["tool"] = "sovlab";
  j["version"] = SOVLAB_VERSION;
  j["experiment"] = experiment_name(cfg.experiment());
  j["config"] = config_json(cfg, false);
  return sha256_hex(j.dump());
}

nlohmann::json to_structured(const RunResult& r, const RunConfig& cfg) {
  nlohmann::json j;
  j["manifest"] = {{"file", kManifestFile}, {"run_id", run_id(cfg)}};
  j["experiment"] = experiment_name(cfg.experiment());
  j["config"] = config_json(cfg, false);
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : r.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json jr = nlohmann::json::array();
      for (const auto& c : row) jr.push_back(cell_json(c));
      rows.push_back(std::move(jr));
    }
    tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
  }
  j["tables"] = std::move(tables);
  return j;
}

RunResult from_structured(const nlohmann::json& j) {
  RunResult r;
  for (const auto& jt : j.at("tables")) {
    Table t;
    t.name = jt.at("name").get<std::string>();
    t.columns = jt.at("columns").get<std::vector<std::string>>();
    for (const auto& jr : jt.at("rows")) {
      std::vector<Cell> row;
      for (const auto& c : jr) {
        if (c.is_null()) row.emplace_back(std::nan(""));
        else if (c.is_number_integer()) row.emplace_back(c.get<long long>());
        else if (c.is_number()) row.emplace_back(c.get<double>());
        else row.emplace_back(c.get<std::string>());
      }
      t.add(std::move(row));
    }
    r.tables.push_back(std::move(t));
  }
  return r;
}

EmitReport emit(const RunResult& r, const RunConfig& cfg, double wall_seconds,
                unsigned threads) {
  const fs::path dir = cfg.text("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  EmitReport rep;
  nlohmann::json outputs = nlohmann::json::array();
  auto put = [&](const std::string& name, const std::string& bytes) {
    const fs::path p = dir / name;
    write_file(p, bytes);
    rep.files.push_back(p);
    outputs.push_back({{"file", name}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
  };
  if (cfg.text("format") == "csv") {
    for (const auto& t : r.tables) put(t.name + ".csv", to_csv(t));
  } else {
    put(experiment_name(cfg.experiment()) + ".json", to_structured(r, cfg).dump(1) + "\n");
  }

  nlohmann::json m;
  m["tool"] = "sovlab";
  m["version"] = SOVLAB_VERSION;
  m["experiment"] = experiment_name(cfg.experiment());
  m["run_id"] = run_id(cfg);
  m["config"] = config_json(cfg, true);
  m["seeds"] = {{"base", cfg.seed()},
                {"derivation", "splitmix64(base + 0x9E3779B97F4A7C15 * (index + 1))"}};
  m["threads"] = threads;
  m["wall_time_s"] = wall_seconds;
  m["outputs"] = std::move(outputs);
  rep.manifest = dir / kManifestFile;
  write_file(rep.manifest, m.dump(1) + "\n");
  return rep;
}

}  // namespace sovlab::cli
