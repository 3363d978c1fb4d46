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

#include "sovlab/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace sovlab::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names{
      {Experiment::quantum_sov, "quantum-sov"},
      {Experiment::otoc, "otoc"},
      {Experiment::min_state, "min-state"},
      {Experiment::classical_lyapunov, "classical-lyapunov"},
      {Experiment::phase_diagram, "phase-diagram"},
      {Experiment::validate, "validate"},
  };
  return names;
}

const ParamSpec& lookup(const std::string& key) {
  for (const auto& p : schema()) {
    if (p.key == key) return p;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_real(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

template <class T>
bool parse_whole(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc() && r.ptr == end;
}

}  // namespace

Experiment parse_experiment(const std::string& name) {
  for (const auto& [e, n] : experiment_names()) {
    if (n == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string experiment_name(Experiment e) {
  for (const auto& [x, n] : experiment_names()) {
    if (x == e) return n;
  }
  return "?";
}

const std::vector<ParamSpec>& schema() {
  using K = ParamKind;
  static const std::vector<ParamSpec> s{
      {"S", K::real, "20", 0.5, 40, {}, "spin length, integer or half-integer"},
      {"omega", K::real, "1", 1e-12, 1e3, {}, "LMG field strength"},
      {"gamma", K::real, "2", 0, 1e3, {}, "noise strength"},
      {"ax", K::real, "0.5773502691896258", -kInf, kInf, {}, "observable coefficient of Sx"},
      {"ay", K::real, "0.5773502691896258", -kInf, kInf, {}, "observable coefficient of Sy"},
      {"az", K::real, "0.5773502691896258", -kInf, kInf, {}, "observable coefficient of Sz"},
      {"jump", K::text, "h0", 0, 0, {"h0", "sx", "sy", "sz"}, "operator coupled to the noise"},
      {"t_min", K::real, "0.001", 1e-12, kInf, {}, "first time of a log grid"},
      {"t_max", K::real, "20", 1e-12, kInf, {}, "last sample time"},
      {"n_times", K::integer, "400", 3, 1e6, {}, "number of sample times"},
      {"grid", K::text, "log", 0, 0, {"log", "linear"}, "time grid of quantum-sov"},
      {"propagation", K::text, "spectral", 0, 0, {"spectral", "ode"}, "propagator route"},
      {"ode_dt", K::real, "0.001", 1e-9, 1, {}, "RK4 step of the ode route"},
      {"fd_refine_max", K::integer, "64", 1, 65536, {}, "largest grid refinement of the otoc finite-difference route"},
      {"trajectories", K::integer, "0", 0, 1e8, {}, "quantum Monte Carlo trajectories, 0 disables"},
      {"dt", K::real, "0.001", 1e-9, 1, {}, "stochastic integration step"},
      {"conv_tol", K::real, "1e-06", 1e-15, 1, {}, "min-state convergence tolerance"},
      {"T", K::real, "20", 1e-9, 1e6, {}, "classical integration horizon"},
      {"realizations", K::integer, "200", 1, 1e8, {}, "Benettin realizations"},
      {"delta0", K::real, "1e-08", 1e-300, 1, {}, "Benettin separation"},
      {"renorm_interval", K::real, "0.5", 1e-9, 1e6, {}, "Benettin renormalization interval"},
      {"x0_q", K::real, "0", -2, 2, {}, "Benettin reference Q"},
      {"x0_p", K::real, "0", -2, 2, {}, "Benettin reference P"},
      {"sov_realizations", K::integer, "1000", 2, 1e8, {}, "ensemble size of the variance estimator"},
      {"epsilon0", K::real, "0.001", 1e-300, 2, {}, "initial Q of the variance estimator"},
      {"fit_begin", K::real, "2", 0, kInf, {}, "start of the variance fit window"},
      {"fit_end", K::real, "8", 0, kInf, {}, "end of the variance fit window"},
      {"sample_spacing", K::real, "0.1", 1e-9, 1e3, {}, "variance sampling interval"},
      {"blowup_bound", K::real, "1000000", 1, kInf, {}, "escape bound on |Q|, |P|"},
      {"omega_min", K::real, "0.1", 1e-12, 1e3, {}, "phase-diagram omega range"},
      {"omega_max", K::real, "4", 1e-12, 1e3, {}, ""},
      {"omega_points", K::integer, "40", 1, 1e5, {}, ""},
      {"gamma_min", K::real, "0", 0, 1e3, {}, "phase-diagram gamma range"},
      {"gamma_max", K::real, "2.9", 0, 1e3, {}, ""},
      {"gamma_points", K::integer, "30", 1, 1e5, {}, ""},
      {"pd_realizations", K::integer, "100", 1, 1e8, {}, "Benettin realizations per cell"},
      {"seed", K::seed, "0", 0, 0, {}, "base seed"},
      {"threads", K::integer, "0", 0, 4096, {}, "workers, 0 defers to SOVLAB_THREADS", true},
      {"out", K::text, ".", 0, 0, {}, "output directory", true},
      {"format", K::text, "csv", 0, 0, {"csv", "structured"}, "output format", true},
  };
  return s;
}

RunConfig::RunConfig(Experiment e) : experiment_(e) {
  for (const auto& p : schema()) values_[p.key] = p.fallback;
}

void RunConfig::set(const std::string& key, const std::string& raw, const std::string& origin) {
  const ParamSpec& p = lookup(key);
  const std::string v = trim(raw);
  auto fail = [&](const std::string& why) {
    throw ConfigError(origin + ": " + key + " = '" + v + "': " + why);
  };
  switch (p.kind) {
    case ParamKind::real: {
      double x = 0.0;
      if (!parse_whole(v, x) || !std::isfinite(x)) fail("expected a finite number");
      if (x < p.lo || x > p.hi) {
        fail("outside [" + format_real(p.lo) + ", " + format_real(p.hi) + "]");
      }
      if (key == "S" && std::abs(2.0 * x - std::round(2.0 * x)) > 1e-12) {
        fail("spin must be a multiple of 1/2");
      }
      values_[key] = format_real(x);
      break;
    }
    case ParamKind::integer: {
      long long x = 0;
      if (!parse_whole(v, x)) fail("expected an integer");
      if (static_cast<double>(x) < p.lo || static_cast<double>(x) > p.hi) {
        fail("outside [" + format_real(p.lo) + ", " + format_real(p.hi) + "]");
      }
      values_[key] = std::to_string(x);
      break;
    }
    case ParamKind::seed: {
      std::uint64_t x = 0;
      if (!parse_whole(v, x)) fail("expected an unsigned 64-bit integer");
      values_[key] = std::to_string(x);
      break;
    }
    case ParamKind::text:
      if (v.empty()) fail("empty value");
      if (!p.choices.empty() &&
          std::find(p.choices.begin(), p.choices.end(), v) == p.choices.end()) {
        std::string all;
        for (const auto& c : p.choices) all += (all.empty() ? "" : "|") + c;
        fail("expected one of " + all);
      }
      values_[key] = v;
      break;
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    set(trim(line.substr(0, eq)), line.substr(eq + 1), where);
  }
}

void RunConfig::validate() const {
  if (real("t_min") >= real("t_max")) throw ConfigError("t_min must be below t_max");
  if (real("fit_begin") >= real("fit_end")) throw ConfigError("fit_begin must be below fit_end");
  if (real("omega_min") > real("omega_max")) throw ConfigError("omega_min exceeds omega_max");
  if (real("gamma_min") > real("gamma_max")) throw ConfigError("gamma_min exceeds gamma_max");
  if (real("ax") == 0.0 && real("ay") == 0.0 && real("az") == 0.0) {
    throw ConfigError("observable coefficients are all zero");
  }
  if (integer("trajectories") > 0 && real("t_max") / real("dt") > 1e8) {
    throw ConfigError("t_max / dt exceeds 1e8 steps");
  }
}

double RunConfig::real(const std::string& key) const {
  if (lookup(key).kind != ParamKind::real) throw ConfigError(key + " is not a real parameter");
  return std::stod(values_.at(key));
}

long long RunConfig::integer(const std::string& key) const {
  if (lookup(key).kind != ParamKind::integer) throw ConfigError(key + " is not an integer parameter");
  return std::stoll(values_.at(key));
}

std::uint64_t RunConfig::seed() const { return std::stoull(values_.at("seed")); }

const std::string& RunConfig::text(const std::string& key) const {
  if (lookup(key).kind != ParamKind::text) throw ConfigError(key + " is not a text parameter");
  return values_.at(key);
}

}  // namespace sovlab::cli
