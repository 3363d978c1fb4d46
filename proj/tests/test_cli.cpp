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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sovlab/cli/config.hpp"
#include "sovlab/cli/emit.hpp"
#include "sovlab/cli/experiments.hpp"

using namespace sovlab;
using namespace sovlab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sovlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SOVLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing, canonical values and range checks") {
  RunConfig c(Experiment::quantum_sov);
  CHECK(c.real("S") == 20.0);
  CHECK(c.real("gamma") == 2.0);
  c.set("S", " 1.50 ");
  CHECK(c.values().at("S") == "1.5");
  CHECK_THROWS_AS(c.set("S", "1.3"), ConfigError);
  CHECK_THROWS_AS(c.set("gamma", "-1"), ConfigError);
  CHECK_THROWS_AS(c.set("gamma", "abc"), ConfigError);
  CHECK_THROWS_AS(c.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("grid", "cubic"), ConfigError);
  c.set("seed", "18446744073709551615");
  CHECK(c.seed() == 18446744073709551615ULL);
  c.set("t_min", "30");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(parse_experiment("nope"), ConfigError);
}

TEST_CASE("config file with comments; later assignments override") {
  const auto dir = scratch("cfg");
  {
    std::ofstream f(dir / "run.cfg");
    f << "# comment\nS = 2\n\nomega=1.5  # trailing\n";
  }
  RunConfig c(Experiment::otoc);
  c.load_file(dir / "run.cfg");
  CHECK(c.real("S") == 2.0);
  CHECK(c.real("omega") == 1.5);
  c.set("omega", "0.5");
  CHECK(c.real("omega") == 0.5);
  {
    std::ofstream f(dir / "bad.cfg");
    f << "gamma 2\n";
  }
  CHECK_THROWS_AS(c.load_file(dir / "bad.cfg"), ConfigError);
  CHECK_THROWS_AS(c.load_file(dir / "missing.cfg"), ConfigError);
}

TEST_CASE("RFC 4180 output") {
  Table t{"x", {"a", "b,c"}, {}};
  CHECK(to_csv(t) == "a,\"b,c\"\r\n");
  t.add({1.5, std::string("say \"hi\"")});
  t.add({std::nan(""), 7LL});
  CHECK(to_csv(t) == "a,\"b,c\"\r\n1.5,\"say \"\"hi\"\"\"\r\nnan,7\r\n");
  CHECK_THROWS(t.add({1.0}));
  CHECK(format_cell(0.1) == "0.1");
  CHECK(format_cell(1e-300) == "1e-300");
}

TEST_CASE("structured output round trip") {
  RunResult r;
  Table t{"series", {"t", "v", "n", "s"}, {}};
  t.add({0.1, 1.0 / 3.0, 5LL, std::string("ok")});
  t.add({2.0, 6.02214076e23, -1LL, std::string("")});
  r.tables.push_back(t);
  const RunConfig cfg(Experiment::otoc);
  const auto j = to_structured(r, cfg);
  CHECK(j["manifest"]["file"] == kManifestFile);
  CHECK(j["manifest"]["run_id"] == run_id(cfg));
  const auto back = from_structured(nlohmann::json::parse(j.dump()));
  REQUIRE(back.tables.size() == 1);
  CHECK(back.tables[0].columns == t.columns);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
      CHECK(format_cell(back.tables[0].rows[i][k]) == format_cell(t.rows[i][k]));
    }
  }
}

TEST_CASE("run identity ignores runtime-only keys") {
  RunConfig a(Experiment::otoc), b(Experiment::otoc);
  b.set("threads", "8");
  b.set("out", "/elsewhere");
  CHECK(run_id(a) == run_id(b));
  b.set("seed", "1");
  CHECK(run_id(a) != run_id(b));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("emit writes a manifest with file hashes") {
  const auto dir = scratch("emit");
  RunConfig cfg(Experiment::phase_diagram);
  cfg.set("out", dir.string());
  RunResult r;
  r.tables.push_back(Table{"empty", {"omega", "gamma"}, {}});
  const auto rep = emit(r, cfg, 0.5, 1);
  REQUIRE(rep.files.size() == 1);
  CHECK(slurp(rep.files[0]) == "omega,gamma\r\n");
  const auto m = nlohmann::json::parse(slurp(rep.manifest));
  CHECK(m["outputs"][0]["file"] == "empty.csv");
  CHECK(m["outputs"][0]["sha256"] == sha256_hex("omega,gamma\r\n"));
  CHECK(m["run_id"] == run_id(cfg));
  CHECK(m.contains("wall_time_s"));
}

TEST_CASE("experiments emit the documented columns") {
  const auto dir = scratch("otoc");
  RunConfig cfg(Experiment::otoc);
  cfg.set("S", "2");
  cfg.set("t_max", "1");
  cfg.set("n_times", "11");
  cfg.set("out", dir.string());
  std::ostringstream log, err;
  REQUIRE(run(cfg, log, err) == kExitOk);
  const auto csv = slurp(dir / "otoc.csv");
  CHECK(csv.rfind("t,C_t,C_t_sov,C0_exp_model\r\n", 0) == 0);

  RunConfig q(Experiment::quantum_sov);
  q.set("S", "1");
  q.set("n_times", "20");
  q.set("out", dir.string());
  REQUIRE(run(q, log, err) == kExitOk);
  CHECK(slurp(dir / "sov_spectrum.csv").rfind("t,Lambda_0,Lambda_1,Lambda_2,minstate_expectation\r\n", 0) == 0);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run_cli("otoc --bogus 1 --out " + dir.string()) == kExitConfig);
  CHECK(run_cli("otoc --gamma -3 --out " + dir.string()) == kExitConfig);
  CHECK(run_cli("unknown-experiment") == kExitConfig);
  // A short horizon leaves the lowest SOV eigenvector unconverged.
  CHECK(run_cli("min-state --S 2 --t_min 1e-4 --t_max 0.001 --conv_tol 1e-14 --out " + dir.string()) ==
        kExitNonConvergence);
  CHECK(run_cli("min-state --S 2 --t_max 20 --out " + dir.string()) == kExitOk);
}

TEST_CASE("outputs are bit-identical across worker counts") {
  std::string first;
  for (int threads : {1, 3}) {
    const auto dir = scratch("det" + std::to_string(threads));
    REQUIRE(run_cli("classical-lyapunov --omega 1.5 --gamma 0.25 --T 2 --realizations 8 "
                    "--sov_realizations 20 --fit_begin 0.5 --fit_end 1.5 --seed 77 --threads " +
                    std::to_string(threads) + " --out " + dir.string()) == kExitOk);
    const auto bytes = slurp(dir / "lyapunov.csv") + slurp(dir / "classical_variance.csv");
    if (first.empty()) first = bytes;
    else CHECK(bytes == first);
  }
}

}
