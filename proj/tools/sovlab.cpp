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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sovlab/cli/config.hpp"
#include "sovlab/cli/experiments.hpp"

namespace {

std::string schema_help() {
  std::string s = "Parameters (--key value or key = value in the config file):\n";
  for (const auto& p : sovlab::cli::schema()) {
    s += "  " + p.key + " [" + p.fallback + "]";
    if (!p.choices.empty()) {
      s += " {";
      for (std::size_t i = 0; i < p.choices.size(); ++i) s += (i ? "|" : "") + p.choices[i];
      s += "}";
    }
    if (!p.doc.empty()) s += "  " + p.doc;
    s += "\n";
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sovlab::cli;
  CLI::App app{"Stochastic operator variance, dissipative OTOCs and Lyapunov exponents"};
  app.footer(schema_help());
  app.allow_extras();
  std::string experiment, config_file, out, format, threads, seed;
  app.add_option("experiment", experiment,
                 "quantum-sov | otoc | min-state | classical-lyapunov | phase-diagram | validate")
      ->required();
  app.add_option("--config", config_file, "flat key = value file");
  app.add_option("--out", out, "output directory");
  app.add_option("--format", format, "csv | structured");
  app.add_option("--threads", threads, "worker count (falls back to SOVLAB_THREADS)");
  app.add_option("--seed", seed, "base seed, unsigned 64-bit");
  app.add_flag_callback("--version", [] {
    std::cout << "sovlab " << SOVLAB_VERSION << "\n";
    std::exit(0);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    RunConfig cfg(parse_experiment(experiment));
    if (!config_file.empty()) cfg.load_file(config_file);
    const std::vector<std::string> extras = app.remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      const std::string& a = extras[i];
      if (a.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + a + "'");
      const auto eq = a.find('=');
      if (eq != std::string::npos) {
        cfg.set(a.substr(2, eq - 2), a.substr(eq + 1));
      } else {
        if (i + 1 >= extras.size()) throw ConfigError("missing value for " + a);
        cfg.set(a.substr(2), extras[++i]);
      }
    }
    if (!out.empty()) cfg.set("out", out);
    if (!format.empty()) cfg.set("format", format);
    if (!threads.empty()) cfg.set("threads", threads);
    if (!seed.empty()) cfg.set("seed", seed);
    return run(cfg, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "{\"error\":{\"kind\":\"config\",\"message\":" << nlohmann::json(e.what()).dump()
              << "},\"exit_code\":" << kExitConfig << "}\n";
    return kExitConfig;
  }
}
