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

#include <cmath>
#include <random>

#include "sovlab/classical.hpp"
#include "sovlab/parallel.hpp"
#include "sovlab/trajectories.hpp"

using namespace sovlab;
using namespace sovlab::classical;

TEST_SUITE("classical") {

TEST_CASE("Hamilton's equations are the symplectic gradient of H") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const double omega = 0.3 + 0.2 * k;
    const PhaseState x{u(rng), u(rng)};
    const double dhdq = (classical_hamiltonian(omega, {x.q + h, x.p}) - classical_hamiltonian(omega, {x.q - h, x.p})) / (2 * h);
    const double dhdp = (classical_hamiltonian(omega, {x.q, x.p + h}) - classical_hamiltonian(omega, {x.q, x.p - h})) / (2 * h);
    const auto f = hamilton_rhs(omega, x);
    CHECK(f.q == doctest::Approx(dhdp).epsilon(1e-7));
    CHECK(f.p == doctest::Approx(-dhdq).epsilon(1e-7));
  }
  const auto j = linearization_at_origin(1.0);
  CHECK(j(0, 1) == 1.0);
  CHECK(j(1, 0) == 1.0);
}

TEST_CASE("coherent-state chart") {
  CHECK(PhaseState{0.0, 0.0}.zeta() == cplx(0.0, 0.0));
  CHECK(std::abs(PhaseState{1.0, 1.0}.zeta() - cplx(1.0, -1.0) / std::sqrt(2.0)) < 1e-15);
  CHECK_FALSE(PhaseState{2.0, 0.0}.in_chart());
  CHECK_THROWS(PhaseState{2.0, 0.0}.zeta());
}

TEST_CASE("spec validation") {
  CHECK_THROWS(ClassicalSpec(0.0, 0.1));
  CHECK_THROWS(ClassicalSpec(1.0, -0.1));
}

TEST_CASE("order-1.0 scheme on geometric Brownian motion") {
  const double mu = 0.5, sigma = 0.8, T = 1.0;
  const double dts[] = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  const double fine = 1e-4;
  const auto n_fine = static_cast<std::size_t>(std::llround(T / fine));
  auto a = [&](double x) { return mu * x; };
  auto b = [&](double x) { return sigma * x; };
  std::vector<double> err(5, 0.0);
  const int paths = 300;
  for (int p = 0; p < paths; ++p) {
    const auto path = traj::sample_noise_path(1000 + p, fine, n_fine);
    double w = 0.0;
    for (double dw : path.increments) w += dw;
    const double exact = std::exp((mu - 0.5 * sigma * sigma) * T + sigma * w);
    for (int k = 0; k < 5; ++k) {
      const auto r = static_cast<std::size_t>(std::llround(dts[k] / fine));
      double x = 1.0;
      for (std::size_t i = 0; i < n_fine; i += r) {
        double dw = 0.0;
        for (std::size_t j = i; j < i + r; ++j) dw += path.increments[j];
        x = sde_step_order1(a, b, x, dts[k], dw);
      }
      err[k] += std::abs(x - exact) / paths;
    }
  }
  // Least-squares slope of log error against log dt.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < 5; ++k) {
    const double lx = std::log(dts[k]), ly = std::log(err[k]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double slope = (5 * sxy - sx * sy) / (5 * sxx - sx * sx);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("zero diffusion reduces the step to explicit Euler") {
  const ClassicalSpec spec(1.3, 0.0);
  const Eigen::Vector2d x(0.3, -0.4);
  const Eigen::Vector2d y = slmg_step(spec, x, 1e-2, 0.7);
  CHECK((y - (x + 1e-2 * hamilton_rhs(1.3, x))).norm() < 1e-16);
}

TEST_CASE("energy is conserved without noise") {
  SDEConfig cfg;
  cfg.dt = 1e-4;
  cfg.n_steps = 200000;
  for (double omega : {3.0, 2.5}) {
    const PhaseState x0{0.01, 0.0};
    const auto path = integrate_path(ClassicalSpec(omega, 0.0), x0, cfg, 100);
    CHECK_FALSE(path.diverged);
    double worst = 0.0;
    for (const auto& s : path.samples) {
      worst = std::max(worst, std::abs(classical_hamiltonian(omega, s) - classical_hamiltonian(omega, x0)));
    }
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("divergence is reported with its time") {
  SDEConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_steps = 10000;
  cfg.seed = 3;
  const auto path = integrate_path(ClassicalSpec(1.0, 0.0), {0.5, 0.0}, cfg, 1, 0.6);
  CHECK(path.diverged);
  CHECK(path.divergence_time > 0.0);
  CHECK(path.divergence_time < 10.0);
}

TEST_CASE("van Kampen closed form and matrix agree") {
  for (double omega = 0.05; omega <= 2.0; omega += 0.05) {
    for (double gamma : {0.0, 0.1, 0.5, 1.5, 2.9}) {
      const double mu2 = 2 * omega - omega * omega;
      CHECK(std::abs(van_kampen_matrix(omega, gamma).max_eigenvalue - (std::sqrt(mu2) - gamma * mu2)) < 1e-10);
    }
  }
  CHECK(lyapunov_van_kampen(1.0, 1.5).value == doctest::Approx(-0.5));
  CHECK(lyapunov_van_kampen(3.0, 1.5).value == doctest::Approx(4.5));
  CHECK(lyapunov_van_kampen(3.0, 0.0).value == doctest::Approx(0.0));
  CHECK(std::abs(lyapunov_van_kampen(2.0, 1.0).value) < 1e-12);
  const auto m = van_kampen_matrix(1.0, 0.3);
  CHECK((m.effective - (m.drift - 0.3 * m.drift * m.drift)).norm() < 1e-15);
}

TEST_CASE("Benettin benchmark and determinism") {
  SDEConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_steps = 20000;
  cfg.seed = 17;
  BenettinOptions o;
  o.realizations = 16;
  o.threads = 1;
  const auto e = lyapunov_benettin(ClassicalSpec(1.0, 0.0), cfg, o);
  CHECK(e.value == doctest::Approx(1.0).epsilon(0.05));
  CHECK(e.blowups == 0);

  cfg.n_steps = 3000;
  const auto noisy1 = lyapunov_benettin(ClassicalSpec(1.0, 0.5), cfg, o);
  o.threads = 4;
  const auto noisy4 = lyapunov_benettin(ClassicalSpec(1.0, 0.5), cfg, o);
  CHECK(noisy1.value == noisy4.value);
  CHECK(noisy1.std_error == noisy4.std_error);
  CHECK(noisy1.std_error > 0.0);
}

TEST_CASE("Benettin is insensitive to the initial separation") {
  SDEConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_steps = 5000;
  cfg.seed = 5;
  BenettinOptions o;
  o.realizations = 30;
  double ref = 0.0, se = 0.0;
  for (double d0 : {1e-8, 1e-6, 1e-10}) {
    o.delta0 = d0;
    const auto e = lyapunov_benettin(ClassicalSpec(1.5, 0.25), cfg, o);
    if (d0 == 1e-8) {
      ref = e.value;
      se = e.std_error;
    }
    CHECK(std::abs(e.value - ref) <= std::max(se, e.std_error));
  }
}

TEST_CASE("renormalized and raw estimators agree at small T") {
  SDEConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_steps = 2000;
  cfg.seed = 8;
  BenettinOptions renorm, raw;
  renorm.realizations = raw.realizations = 10;
  renorm.renorm_interval = 0.5;
  raw.renorm_interval = 2.0;  // single renormalization at T
  const ClassicalSpec spec(1.0, 0.25);
  for (std::size_t r = 0; r < 10; ++r) {
    const auto seed = derive_seed(cfg.seed, r);
    CHECK(benettin_realization(spec, cfg, renorm, seed) ==
          doctest::Approx(benettin_realization(spec, cfg, raw, seed)).epsilon(1e-6));
  }
}

TEST_CASE("blow-ups are counted and flagged") {
  SDEConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_steps = 2000;
  BenettinOptions o;
  o.realizations = 10;
  o.x0 = {0.5, 0.0};
  o.blowup_bound = 0.55;
  const auto e = lyapunov_benettin(ClassicalSpec(1.0, 0.0), cfg, o);
  CHECK(e.blowups == 10);
  CHECK(e.unreliable);
  CHECK(std::isnan(e.value));
}

TEST_CASE("variance fit recovers an injected exponential") {
  std::vector<double> t, v;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    v.push_back(1e-6 * std::exp(2 * 0.7 * 0.1 * i));
  }
  const auto f = fit_variance_growth(t, v, {2.0, 8.0});
  CHECK(f.lambda == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.std_error < 1e-10);
  std::vector<double> flat(t.size(), 1.0);
  CHECK_THROWS_AS(fit_variance_growth(t, flat, {2.0, 8.0}), NumericalError);
}

TEST_CASE("variance estimator is inapplicable without noise") {
  SDEConfig cfg;
  ClassicalSovOptions o;
  o.realizations = 10;
  const auto r = lyapunov_from_classical_sov(ClassicalSpec(1.0, 0.0), cfg, o);
  CHECK_FALSE(r.estimate.applicable);
}

TEST_CASE("phase diagram layout and per-cell seeding") {
  SDEConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_steps = 1000;
  cfg.seed = 9;
  BenettinOptions o;
  o.realizations = 4;
  const std::vector<double> omegas{0.5, 1.0, 3.0}, gammas{0.0, 0.5};
  o.threads = 1;
  const auto a = phase_diagram(omegas, gammas, cfg, o);
  o.threads = 3;
  const auto b = phase_diagram(omegas, gammas, cfg, o);
  REQUIRE(a.size() == 6);
  CHECK(a[4].omega == 1.0);
  CHECK(a[4].gamma == 0.5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].estimate.value == b[i].estimate.value);
    CHECK(a[i].failure.empty());
  }
}

}
