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

#include "sovlab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "sovlab/parallel.hpp"

namespace sovlab::classical {

cplx PhaseState::zeta() const {
  if (!in_chart()) throw Error("PhaseState::zeta: outside the chart Q^2 + P^2 < 4");
  return cplx(q, -p) / std::sqrt(4.0 - q * q - p * p);
}

ClassicalSpec::ClassicalSpec(double omega_, double gamma_) : omega(omega_), gamma(gamma_) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw Error("ClassicalSpec: omega must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw Error("ClassicalSpec: gamma must be >= 0");
}

double classical_hamiltonian(double omega, PhaseState x) {
  const double q2 = x.q * x.q, p2 = x.p * x.p;
  return 0.5 * omega * p2 + (0.5 * omega - 1.0) * q2 + 0.25 * (q2 * p2 + q2 * q2);
}

Eigen::Vector2d hamilton_rhs(double omega, const Eigen::Vector2d& x) {
  const double q = x(0), p = x(1);
  return {omega * p + 0.5 * q * q * p, -((omega - 2.0) * q + 0.5 * q * p * p + q * q * q)};
}

PhaseState hamilton_rhs(double omega, PhaseState x) {
  return PhaseState::from(hamilton_rhs(omega, x.vec()));
}

Eigen::Matrix2d linearization_at_origin(double omega) {
  Eigen::Matrix2d j;
  j << 0.0, omega, -(omega - 2.0), 0.0;
  return j;
}

Eigen::Vector2d slmg_step(const ClassicalSpec& spec, const Eigen::Vector2d& x,
                          double dt, double dw) {
  const double omega = spec.omega;
  const double s = std::sqrt(2.0 * spec.gamma);
  auto drift = [omega](const Eigen::Vector2d& y) -> Eigen::Vector2d { return hamilton_rhs(omega, y); };
  auto diff = [omega, s](const Eigen::Vector2d& y) -> Eigen::Vector2d { return s * hamilton_rhs(omega, y); };
  return sde_step_order1(drift, diff, x, dt, dw);
}

namespace {

bool escaped(const Eigen::Vector2d& x, double bound) {
  return !std::isfinite(x(0)) || !std::isfinite(x(1)) || std::abs(x(0)) > bound ||
         std::abs(x(1)) > bound;
}

void check_config(const SDEConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error("SDEConfig: dt must be positive");
  if (cfg.n_steps == 0) throw Error("SDEConfig: n_steps must be positive");
}

}  // namespace

PathOutcome integrate_path(const ClassicalSpec& spec, PhaseState x0, const SDEConfig& cfg,
                           std::size_t stride, double bound) {
  check_config(cfg);
  if (stride == 0) throw Error("integrate_path: stride must be positive");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(cfg.dt));
  PathOutcome out;
  out.samples.reserve(cfg.n_steps / stride + 1);
  out.samples.push_back(x0);
  Eigen::Vector2d x = x0.vec();
  for (std::size_t n = 1; n <= cfg.n_steps; ++n) {
    x = slmg_step(spec, x, cfg.dt, normal(rng));
    if (escaped(x, bound)) {
      out.diverged = true;
      out.divergence_time = cfg.dt * static_cast<double>(n);
      return out;
    }
    if (n % stride == 0) out.samples.push_back(PhaseState::from(x));
  }
  return out;
}

VanKampenResult van_kampen_matrix(double omega, double gamma) {
  VanKampenResult r;
  r.drift << 0.0, 0.0, omega,
             0.0, 0.0, -(omega - 2.0),
             -(omega - 2.0) / 2.0, omega / 2.0, 0.0;
  r.effective = r.drift - gamma * r.drift * r.drift;
  Eigen::EigenSolver<Eigen::Matrix3d> es(r.drift);
  if (es.info() != Eigen::Success) throw NumericalError("van_kampen_matrix: eigensolver failed");
  const double scale = std::max(1.0, r.drift.cwiseAbs().maxCoeff());
  bool any = false;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const std::complex<double> a = es.eigenvalues()(k);
    if (std::abs(a) <= 1e-7 * scale) continue;
    best = std::max(best, (a - gamma * a * a).real());
    any = true;
  }
  r.max_eigenvalue = any ? best : 0.0;
  return r;
}

LyapunovEstimate lyapunov_van_kampen(double omega, double gamma) {
  ClassicalSpec spec(omega, gamma);
  LyapunovEstimate e;
  e.method = LyapunovMethod::van_kampen;
  if (omega <= 2.0) {
    const double mu2 = 2.0 * omega - omega * omega;
    e.value = std::sqrt(mu2) - gamma * mu2;
  } else {
    e.value = van_kampen_matrix(omega, gamma).max_eigenvalue;
  }
  return e;
}

double benettin_realization(const ClassicalSpec& spec, const SDEConfig& cfg,
                            const BenettinOptions& opts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(cfg.dt));
  const auto every = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(opts.renorm_interval / cfg.dt)));
  Eigen::Vector2d y = opts.x0.vec();
  Eigen::Vector2d z = y + Eigen::Vector2d(opts.delta0, 0.0);
  double acc = 0.0;
  auto renormalize = [&]() {
    const Eigen::Vector2d sep = z - y;
    const double d = sep.norm();
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    acc += std::log(d / opts.delta0);
    z = y + sep * (opts.delta0 / d);
    return true;
  };
  for (std::size_t n = 1; n <= cfg.n_steps; ++n) {
    const double dw = normal(rng);
    y = slmg_step(spec, y, cfg.dt, dw);
    z = slmg_step(spec, z, cfg.dt, dw);
    if (escaped(y, opts.blowup_bound) || escaped(z, opts.blowup_bound)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    if (n % every == 0 || n == cfg.n_steps) {
      if (!renormalize()) return std::numeric_limits<double>::quiet_NaN();
    }
  }
  return acc / cfg.total_time();
}

namespace {

void check_benettin(const BenettinOptions& opts) {
  if (!(opts.delta0 > 0.0)) throw Error("lyapunov_benettin: delta0 must be positive");
  if (!(opts.renorm_interval > 0.0)) throw Error("lyapunov_benettin: renorm_interval must be positive");
  if (opts.realizations == 0) throw Error("lyapunov_benettin: need at least one realization");
}

LyapunovEstimate summarize(const std::vector<double>& lambdas) {
  LyapunovEstimate e;
  e.method = LyapunovMethod::benettin;
  e.realizations = lambdas.size();
  double sum = 0.0;
  std::size_t ok = 0;
  for (double l : lambdas) {
    if (std::isnan(l)) { ++e.blowups; continue; }
    sum += l;
    ++ok;
  }
  e.unreliable = 10 * e.blowups > e.realizations;
  if (ok == 0) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    e.std_error = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  e.value = sum / static_cast<double>(ok);
  double ss = 0.0;
  for (double l : lambdas) {
    if (!std::isnan(l)) ss += (l - e.value) * (l - e.value);
  }
  e.std_error = ok > 1 ? std::sqrt(ss / static_cast<double>(ok - 1) / static_cast<double>(ok)) : 0.0;
  return e;
}

}  // namespace

LyapunovEstimate lyapunov_benettin(const ClassicalSpec& spec, const SDEConfig& cfg,
                                   const BenettinOptions& opts) {
  check_config(cfg);
  check_benettin(opts);
  std::vector<double> lambdas(opts.realizations);
  parallel_for(opts.realizations, resolve_threads(opts.threads), [&](std::size_t r) {
    lambdas[r] = benettin_realization(spec, cfg, opts, derive_seed(cfg.seed, r));
  });
  return summarize(lambdas);
}

ClassicalSovResult lyapunov_from_classical_sov(const ClassicalSpec& spec, const SDEConfig& cfg,
                                               const ClassicalSovOptions& opts) {
  check_config(cfg);
  if (!(opts.sample_spacing > 0.0)) throw Error("lyapunov_from_classical_sov: sample_spacing must be positive");
  if (opts.realizations < 2) throw Error("lyapunov_from_classical_sov: need at least two realizations");
  if (!(opts.fit_window.end > opts.fit_window.begin) || opts.fit_window.begin < 0.0) {
    throw Error("lyapunov_from_classical_sov: invalid fit window");
  }
  ClassicalSovResult res;
  res.estimate.method = LyapunovMethod::sov_otoc;
  res.estimate.realizations = opts.realizations;
  if (spec.gamma == 0.0) {
    res.estimate.applicable = false;
    res.estimate.value = std::numeric_limits<double>::quiet_NaN();
    res.estimate.std_error = std::numeric_limits<double>::quiet_NaN();
    return res;
  }

  const auto stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(opts.sample_spacing / cfg.dt)));
  const double h = cfg.dt * static_cast<double>(stride);
  const auto n_samples =
      static_cast<std::size_t>(std::ceil((opts.fit_window.end + h) / h - 1e-9)) + 1;
  SDEConfig run = cfg;
  run.n_steps = stride * (n_samples - 1);

  std::vector<std::vector<double>> q(opts.realizations);
  parallel_for(opts.realizations, resolve_threads(opts.threads), [&](std::size_t r) {
    SDEConfig mine = run;
    mine.seed = derive_seed(cfg.seed, r);
    const auto path = integrate_path(spec, {opts.epsilon0, 0.0}, mine, stride, opts.blowup_bound);
    if (path.diverged) return;
    q[r].reserve(path.samples.size());
    for (const auto& s : path.samples) q[r].push_back(s.q);
  });

  std::size_t ok = 0;
  for (const auto& row : q) ok += row.empty() ? 0 : 1;
  res.estimate.blowups = opts.realizations - ok;
  res.estimate.unreliable = 10 * res.estimate.blowups > opts.realizations;
  if (ok < 2) throw NumericalError("lyapunov_from_classical_sov: fewer than two surviving realizations");

  res.times.resize(n_samples);
  res.variance.resize(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    res.times[j] = h * static_cast<double>(j);
    double mean = 0.0;
    for (const auto& row : q) if (!row.empty()) mean += row[j];
    mean /= static_cast<double>(ok);
    double ss = 0.0;
    for (const auto& row : q) if (!row.empty()) ss += (row[j] - mean) * (row[j] - mean);
    res.variance[j] = ss / static_cast<double>(ok - 1);
  }
  const auto fit = fit_variance_growth(res.times, res.variance, opts.fit_window);
  res.derivative = fit.derivative;
  res.estimate.value = fit.lambda;
  res.estimate.std_error = fit.std_error;
  res.epsilon = fit.epsilon;
  return res;
}

VarianceFit fit_variance_growth(std::span<const double> times,
                                std::span<const double> variance, FitWindow window) {
  const std::size_t n_samples = times.size();
  if (variance.size() != n_samples) throw Error("fit_variance_growth: size mismatch");
  if (n_samples < 3) throw Error("fit_variance_growth: need at least 3 samples");
  const double h = times[1] - times[0];
  VarianceFit fit;
  fit.derivative.assign(n_samples, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 1; j + 1 < n_samples; ++j) {
    fit.derivative[j] = (variance[j + 1] - variance[j - 1]) / (2.0 * h);
  }
  std::vector<double> xs, ys;
  for (std::size_t j = 1; j + 1 < n_samples; ++j) {
    const double t = times[j];
    if (t < window.begin - 1e-12 || t > window.end + 1e-12) continue;
    if (!(fit.derivative[j] > 0.0)) {
      throw NumericalError("non-positive variance growth at t = " + std::to_string(t));
    }
    xs.push_back(t);
    ys.push_back(std::log(fit.derivative[j]));
  }
  if (xs.size() < 3) throw Error("fit_variance_growth: fit window holds fewer than 3 samples");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - intercept - slope * xs[i];
    sse += r * r;
  }
  fit.lambda = 0.5 * slope;
  fit.std_error = 0.5 * std::sqrt(sse / std::max(1.0, n - 2.0) / sxx);
  fit.epsilon = std::exp(intercept);
  return fit;
}

std::vector<PhaseDiagramCell> phase_diagram(std::span<const double> omegas,
                                            std::span<const double> gammas,
                                            const SDEConfig& cfg, const BenettinOptions& opts) {
  check_config(cfg);
  check_benettin(opts);
  const std::size_t n = omegas.size() * gammas.size();
  std::vector<PhaseDiagramCell> cells(n);
  parallel_for(n, resolve_threads(opts.threads), [&](std::size_t i) {
    auto& cell = cells[i];
    cell.omega = omegas[i % omegas.size()];
    cell.gamma = gammas[i / omegas.size()];
    cell.estimate.method = LyapunovMethod::benettin;
    try {
      const ClassicalSpec spec(cell.omega, cell.gamma);
      SDEConfig mine = cfg;
      mine.seed = derive_seed(cfg.seed, i);
      std::vector<double> lambdas(opts.realizations);
      for (std::size_t r = 0; r < opts.realizations; ++r) {
        lambdas[r] = benettin_realization(spec, mine, opts, derive_seed(mine.seed, r));
      }
      cell.estimate = summarize(lambdas);
    } catch (const std::exception& e) {
      cell.failure = e.what();
      cell.estimate.value = std::numeric_limits<double>::quiet_NaN();
      cell.estimate.std_error = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return cells;
}

}  // namespace sovlab::classical
