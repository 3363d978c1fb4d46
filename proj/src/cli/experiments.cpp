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

#include "sovlab/cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "sovlab/classical.hpp"
#include "sovlab/cli/validate.hpp"
#include "sovlab/otoc.hpp"
#include "sovlab/parallel.hpp"
#include "sovlab/sov.hpp"
#include "sovlab/trajectories.hpp"

namespace sovlab::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

superop::PropagationConfig propagation(const RunConfig& cfg) {
  superop::PropagationConfig pc;
  pc.method = cfg.text("propagation") == "ode" ? superop::PropagationMethod::ode
                                                : superop::PropagationMethod::spectral;
  pc.ode_dt = cfg.real("ode_dt");
  return pc;
}

unsigned threads_of(const RunConfig& cfg) {
  return resolve_threads(static_cast<unsigned>(cfg.integer("threads")));
}

Table summary_table(const RunConfig& cfg) {
  Table t{"summary", {"key", "value"}, {}};
  t.add({std::string("manifest"), std::string(kManifestFile)});
  t.add({std::string("run_id"), run_id(cfg)});
  return t;
}

std::vector<std::string> spectrum_columns(int dim) {
  std::vector<std::string> cols{"t"};
  for (int k = 0; k < dim; ++k) cols.push_back("Lambda_" + std::to_string(k));
  return cols;
}

// Snaps sample times onto the stochastic grid, dropping t = 0 and duplicates.
std::vector<double> snap_to_grid(const std::vector<double>& times, double dt) {
  std::vector<double> out;
  for (double t : times) {
    const double n = std::round(t / dt);
    if (n < 1.0) continue;
    const double s = n * dt;
    if (out.empty() || s > out.back()) out.push_back(s);
  }
  return out;
}

ExperimentOutcome quantum_sov(const RunConfig& cfg, std::ostream& log) {
  const QuantumModel m = build_model(cfg);
  const superop::Propagator prop(m.lindblad, propagation(cfg));
  const long long n_traj = cfg.integer("trajectories");
  std::vector<double> times = time_grid(cfg, cfg.text("grid") == "linear");
  if (n_traj > 0) times = snap_to_grid(times, cfg.real("dt"));

  log << "quantum-sov: d = " << m.spin.dim() << ", " << times.size() << " times, "
      << (prop.uses_common_eigenbasis() ? "commuting" : "general") << " propagator\n";
  const auto series = sov::exact_sov_series(prop, m.observable, times);
  const double t_max = times.back();
  const auto minstate = sov::min_sov_state(prop, m.observable, t_max, cfg.real("conv_tol"));

  const int d = m.spin.dim();
  Table spec{"sov_spectrum", spectrum_columns(d), {}};
  spec.columns.push_back("minstate_expectation");
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<Cell> row{times[i]};
    for (int k = 0; k < d; ++k) row.emplace_back(series.eigvals(static_cast<Eigen::Index>(i), k));
    const cplx e = minstate.state.dot(series.sov[i].matrix() * minstate.state);
    row.emplace_back(e.real());
    spec.add(std::move(row));
  }

  Table transport{"transport",
                  {"mode", "window", "t_begin", "t_end", "exponent", "intercept", "residual",
                   "samples", "status"},
                  {}};
  if (m.lindblad.gamma > 0.0) {
    const std::pair<std::string, sov::FitWindow> windows[] = {
        {"early", sov::early_window(m.lindblad.gamma)}, {"mid", sov::mid_window(m.lindblad.gamma)}};
    for (int k = 0; k < d; ++k) {
      for (const auto& [name, w] : windows) {
        try {
          const auto f = sov::transport_exponent_fit(series, static_cast<std::size_t>(k), w);
          transport.add({static_cast<long long>(k), name, w.begin, w.end, f.exponent, f.intercept,
                         f.residual, static_cast<long long>(f.samples), std::string("ok")});
        } catch (const Error& e) {
          transport.add({static_cast<long long>(k), name, w.begin, w.end, kNaN, kNaN, kNaN,
                         0LL, std::string(e.what())});
        }
      }
    }
  }

  Table summary = summary_table(cfg);
  summary.add({std::string("propagator"),
               std::string(prop.uses_common_eigenbasis() ? "commuting"
                           : prop.method() == superop::PropagationMethod::ode ? "ode" : "spectral")});
  summary.add({std::string("minstate_t_max"), t_max});
  summary.add({std::string("minstate_lambda0"), minstate.lambda0});
  summary.add({std::string("minstate_overlap"), minstate.overlap});
  summary.add({std::string("minstate_converged"), static_cast<long long>(minstate.converged)});
  summary.add({std::string("near_crossings"), static_cast<long long>(series.near_crossings.size())});

  ExperimentOutcome out;
  out.result.tables = {spec, transport};

  if (n_traj > 0) {
    traj::EnsembleSpec ens;
    ens.trajectories = static_cast<std::size_t>(n_traj);
    ens.base_seed = cfg.seed();
    ens.dt = cfg.real("dt");
    ens.t_max = t_max;
    ens.threads = threads_of(cfg);
    log << "quantum-sov: " << n_traj << " trajectories\n";
    const auto ms = traj::ensemble_moments(m.observable, m.lindblad, ens, times);
    const auto emp = traj::empirical_sov(ms);
    Table mc{"sov_monte_carlo", spectrum_columns(d), {}};
    mc.columns.push_back("max_abs_z");
    for (std::size_t i = 0; i < times.size(); ++i) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(emp[i].matrix(), Eigen::EigenvaluesOnly);
      std::vector<Cell> row{times[i]};
      for (int k = 0; k < d; ++k) row.emplace_back(es.eigenvalues()(k));
      const CMatrix diff = emp[i].matrix() - series.sov[i].matrix();
      double z = 0.0;
      for (Eigen::Index r = 0; r < diff.rows(); ++r) {
        for (Eigen::Index c = 0; c < diff.cols(); ++c) {
          const cplx se = ms.sov_stderr[i](r, c);
          if (se.real() > 0.0) z = std::max(z, std::abs(diff(r, c).real()) / se.real());
          if (se.imag() > 0.0) z = std::max(z, std::abs(diff(r, c).imag()) / se.imag());
        }
      }
      row.emplace_back(z);
      mc.add(std::move(row));
    }
    out.result.tables.push_back(std::move(mc));
  }
  out.result.tables.push_back(std::move(summary));
  return out;
}

ExperimentOutcome otoc_run(const RunConfig& cfg, std::ostream& log) {
  const QuantumModel m = build_model(cfg);
  if (!(m.lindblad.gamma > 0.0)) throw ConfigError("otoc: gamma must be positive");
  const superop::Propagator prop(m.lindblad, propagation(cfg));
  const auto times = time_grid(cfg, true);
  log << "otoc: d = " << m.spin.dim() << ", " << times.size() << " times\n";
  const auto direct = otoc::dissipative_otoc(prop, m.observable, times);
  const double dt = times[1] - times[0];
  // Derivative of the SOV trace on a grid refined r times; r doubles until
  // the result moves by less than 1% of the signal between refinements.
  auto fd_on_grid = [&](long long r) {
    const std::size_t n = (times.size() - 1) * static_cast<std::size_t>(r) + 1;
    std::vector<double> traces(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = times.front() + dt * static_cast<double>(i) / static_cast<double>(r);
      traces[i] = sov::exact_sov(prop, m.observable, t).matrix().trace().real();
    }
    const auto fine = otoc::otoc_from_sov(traces, times.front(), dt / static_cast<double>(r),
                                          m.lindblad.gamma, m.spin.dim());
    std::vector<double> coarse(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) coarse[i] = fine.values[i * static_cast<std::size_t>(r)];
    return coarse;
  };
  const double peak = *std::max_element(direct.values.begin(), direct.values.end());
  auto change = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1e-10 * peak));
    }
    return worst;
  };
  const long long r_max = cfg.integer("fd_refine_max");
  long long r = 1;
  std::vector<double> via_sov = fd_on_grid(1);
  double fd_change = std::numeric_limits<double>::infinity();
  while (r < r_max) {
    auto next = fd_on_grid(2 * r);
    fd_change = change(via_sov, next);
    via_sov = std::move(next);
    r *= 2;
    if (fd_change < 0.01) break;
  }
  if (!(fd_change < 0.01)) {
    log << "otoc: warning: finite-difference route still changes by " << fd_change
        << " at refinement " << r << "\n";
  }

  Table summary = summary_table(cfg);
  std::optional<otoc::DissipationAnalysis> da;
  try {
    da = otoc::dissipation_time(m.observable, m.jump, m.lindblad.gamma);
    summary.add({std::string("c0"), da->c0});
    summary.add({std::string("tau_d"), da->finite ? da->tau_d : std::numeric_limits<double>::infinity()});
  } catch (const Error& e) {
    summary.add({std::string("dissipation_time"), std::string(e.what())});
  }

  summary.add({std::string("fd_refinement"), r});
  summary.add({std::string("fd_last_relative_change"), fd_change});

  Table t{"otoc", {"t", "C_t", "C_t_sov", "C0_exp_model"}, {}};
  for (std::size_t i = 0; i < times.size(); ++i) {
    t.add({times[i], direct.values[i], via_sov[i], da ? da->model(times[i]) : kNaN});
  }
  ExperimentOutcome out;
  out.result.tables = {t, summary};
  return out;
}

ExperimentOutcome min_state_run(const RunConfig& cfg, std::ostream& log) {
  const QuantumModel m = build_model(cfg);
  const superop::Propagator prop(m.lindblad, propagation(cfg));
  const double t_max = cfg.real("t_max");
  log << "min-state: d = " << m.spin.dim() << ", t_max = " << t_max << "\n";
  const auto ms = sov::min_sov_state(prop, m.observable, t_max, cfg.real("conv_tol"));

  Table state{"min_state", {"index", "m", "re", "im", "probability"}, {}};
  for (Eigen::Index i = 0; i < ms.state.size(); ++i) {
    const cplx a = ms.state(i);
    state.add({static_cast<long long>(i), m.spin.S() - static_cast<double>(i), a.real(), a.imag(),
               std::norm(a)});
  }
  const auto sov_t = sov::exact_sov(prop, m.observable, t_max);
  Table proj{"sov_projection", {"quantity", "component", "re", "im"}, {}};
  if (m.spin.two_s() > 0) {
    const auto p = sov::sov_projection(sov_t, m.spin);
    auto put = [&](const std::string& q, const sov::SpinCoefficients& c) {
      const std::pair<const char*, cplx> comps[] = {{"identity", c.identity}, {"x", c.x}, {"y", c.y}, {"z", c.z}};
      for (const auto& [name, v] : comps) proj.add({q, std::string(name), v.real(), v.imag()});
    };
    put("variance", p.variance);
    put("deviation", p.deviation);
  }
  Table summary = summary_table(cfg);
  summary.add({std::string("t_max"), t_max});
  summary.add({std::string("lambda0"), ms.lambda0});
  summary.add({std::string("overlap"), ms.overlap});
  summary.add({std::string("converged"), static_cast<long long>(ms.converged)});
  summary.add({std::string("degenerate"), static_cast<long long>(ms.degenerate)});

  ExperimentOutcome out;
  out.result.tables = {state, proj, summary};
  if (!ms.converged && !ms.degenerate) {
    out.exit_code = kExitNonConvergence;
    out.message = "min-SOV eigenvector not converged at t_max; overlap " + std::to_string(ms.overlap);
  }
  return out;
}

classical::SDEConfig sde_config(const RunConfig& cfg) {
  classical::SDEConfig sc;
  sc.dt = cfg.real("dt");
  sc.n_steps = static_cast<std::size_t>(std::llround(cfg.real("T") / sc.dt));
  if (sc.n_steps == 0) throw ConfigError("T / dt rounds to zero steps");
  sc.seed = cfg.seed();
  return sc;
}

classical::BenettinOptions benettin_options(const RunConfig& cfg, const char* realizations_key) {
  classical::BenettinOptions o;
  o.x0 = {cfg.real("x0_q"), cfg.real("x0_p")};
  o.delta0 = cfg.real("delta0");
  o.renorm_interval = cfg.real("renorm_interval");
  o.realizations = static_cast<std::size_t>(cfg.integer(realizations_key));
  o.threads = threads_of(cfg);
  o.blowup_bound = cfg.real("blowup_bound");
  return o;
}

ExperimentOutcome classical_lyapunov_run(const RunConfig& cfg, std::ostream& log) {
  const classical::ClassicalSpec spec(cfg.real("omega"), cfg.real("gamma"));
  const auto sc = sde_config(cfg);
  Table t{"lyapunov", {"method", "lambda", "stderr", "realizations", "blowups", "status"}, {}};
  auto put = [&](const std::string& method, const classical::LyapunovEstimate& e,
                 const std::string& status) {
    t.add({method, e.value, e.std_error, static_cast<long long>(e.realizations),
           static_cast<long long>(e.blowups), status});
  };
  log << "classical-lyapunov: omega = " << spec.omega << ", gamma = " << spec.gamma << "\n";
  put("van_kampen", classical::lyapunov_van_kampen(spec.omega, spec.gamma), "ok");
  const auto b = classical::lyapunov_benettin(spec, sc, benettin_options(cfg, "realizations"));
  put("benettin", b, b.unreliable ? "unreliable" : "ok");

  classical::ClassicalSovOptions so;
  so.epsilon0 = cfg.real("epsilon0");
  so.realizations = static_cast<std::size_t>(cfg.integer("sov_realizations"));
  so.fit_window = {cfg.real("fit_begin"), cfg.real("fit_end")};
  so.sample_spacing = cfg.real("sample_spacing");
  so.threads = threads_of(cfg);
  so.blowup_bound = cfg.real("blowup_bound");
  Table var{"classical_variance", {"t", "variance", "d_variance"}, {}};
  try {
    const auto r = classical::lyapunov_from_classical_sov(spec, sc, so);
    put("sov_otoc", r.estimate,
        !r.estimate.applicable ? "inapplicable" : r.estimate.unreliable ? "unreliable" : "ok");
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      var.add({r.times[i], r.variance[i], r.derivative[i]});
    }
  } catch (const NumericalError& e) {
    classical::LyapunovEstimate failed;
    failed.value = failed.std_error = kNaN;
    failed.method = classical::LyapunovMethod::sov_otoc;
    failed.realizations = so.realizations;
    put("sov_otoc", failed, std::string("failed: ") + e.what());
  }
  ExperimentOutcome out;
  out.result.tables = {t, var, summary_table(cfg)};
  return out;
}

std::vector<double> linspace(double a, double b, long long n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

ExperimentOutcome phase_diagram_run(const RunConfig& cfg, std::ostream& log) {
  const auto omegas = linspace(cfg.real("omega_min"), cfg.real("omega_max"), cfg.integer("omega_points"));
  const auto gammas = linspace(cfg.real("gamma_min"), cfg.real("gamma_max"), cfg.integer("gamma_points"));
  log << "phase-diagram: " << omegas.size() << " x " << gammas.size() << " cells\n";
  const auto cells = classical::phase_diagram(omegas, gammas, sde_config(cfg),
                                              benettin_options(cfg, "pd_realizations"));
  Table t{"phase_diagram", {"omega", "gamma", "lambda", "stderr", "n_blowups"}, {}};
  long long failed = 0, unreliable = 0;
  for (const auto& c : cells) {
    t.add({c.omega, c.gamma, c.estimate.value, c.estimate.std_error,
           static_cast<long long>(c.estimate.blowups)});
    failed += c.failure.empty() ? 0 : 1;
    unreliable += c.estimate.unreliable ? 1 : 0;
  }
  Table summary = summary_table(cfg);
  summary.add({std::string("failed_cells"), failed});
  summary.add({std::string("unreliable_cells"), unreliable});
  for (const auto& c : cells) {
    if (!c.failure.empty()) {
      summary.add({"failure@" + format_cell(c.omega) + "," + format_cell(c.gamma), c.failure});
    }
  }
  ExperimentOutcome out;
  out.result.tables = {t, summary};
  return out;
}

ExperimentOutcome validate_run(const RunConfig& cfg, std::ostream& log) {
  const auto checks = run_property_suite(cfg.seed(), threads_of(cfg));
  std::size_t failed = 0;
  for (const auto& c : checks) {
    log << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  value=" << format_cell(c.value)
        << " threshold=" << format_cell(c.threshold);
    if (!c.detail.empty()) log << "  (" << c.detail << ")";
    log << "\n";
    failed += c.pass ? 0 : 1;
  }
  log << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  ExperimentOutcome out;
  out.result.tables = {checks_table(checks), summary_table(cfg)};
  if (failed) {
    out.exit_code = kExitFailure;
    out.message = std::to_string(failed) + " validation checks failed";
  }
  return out;
}

std::string json_escape(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

QuantumModel build_model(const RunConfig& cfg) {
  const auto spin = spin::SpinSpec::from_spin(cfg.real("S"));
  const auto ops = spin::spin_operators(spin);
  auto h0 = spin::lmg_hamiltonian(spin, cfg.real("omega"));
  const std::string& j = cfg.text("jump");
  HermitianOperator jump = j == "sx" ? ops.x : j == "sy" ? ops.y : j == "sz" ? ops.z : h0;
  auto a = spin::spin_combination(spin, cfg.real("ax"), cfg.real("ay"), cfg.real("az"));
  superop::LindbladSpec ls(h0, jump, cfg.real("gamma"));
  return QuantumModel{spin, std::move(h0), std::move(jump), std::move(a), std::move(ls)};
}

std::vector<double> time_grid(const RunConfig& cfg, bool linear) {
  const auto n = static_cast<std::size_t>(cfg.integer("n_times"));
  const double t_min = cfg.real("t_min"), t_max = cfg.real("t_max");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    t[i] = linear ? t_max * f : t_min * std::pow(t_max / t_min, f);
  }
  t.back() = t_max;
  return t;
}

ExperimentOutcome run_experiment(const RunConfig& cfg, std::ostream& log) {
  switch (cfg.experiment()) {
    case Experiment::quantum_sov: return quantum_sov(cfg, log);
    case Experiment::otoc: return otoc_run(cfg, log);
    case Experiment::min_state: return min_state_run(cfg, log);
    case Experiment::classical_lyapunov: return classical_lyapunov_run(cfg, log);
    case Experiment::phase_diagram: return phase_diagram_run(cfg, log);
    case Experiment::validate: return validate_run(cfg, log);
  }
  throw ConfigError("unhandled experiment");
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  auto report = [&](const char* kind, const std::string& msg, int code) {
    err << "{\"error\":{\"kind\":\"" << kind << "\",\"message\":" << json_escape(msg)
        << "},\"exit_code\":" << code << "}\n";
    return code;
  };
  try {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    auto outcome = run_experiment(cfg, log);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto rep = emit(outcome.result, cfg, wall, threads_of(cfg));
    log << "wrote " << rep.files.size() << " files and " << rep.manifest.string() << "\n";
    if (outcome.exit_code == kExitNonConvergence) {
      return report("non_convergence", outcome.message, outcome.exit_code);
    }
    if (outcome.exit_code != kExitOk) return report("failure", outcome.message, outcome.exit_code);
    return kExitOk;
  } catch (const ConfigError& e) {
    return report("config", e.what(), kExitConfig);
  } catch (const NonConvergenceError& e) {
    return report("non_convergence", e.what(), kExitNonConvergence);
  } catch (const NumericalError& e) {
    return report("numerical", e.what(), kExitNumerical);
  } catch (const DimensionError& e) {
    return report("config", e.what(), kExitConfig);
  } catch (const std::exception& e) {
    return report("error", e.what(), kExitFailure);
  }
}

}  // namespace sovlab::cli
