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

#include "sovlab/cli/validate.hpp"

#include <cmath>
#include <random>

#include "sovlab/classical.hpp"
#include "sovlab/otoc.hpp"
#include "sovlab/parallel.hpp"
#include "sovlab/sov.hpp"
#include "sovlab/spin_algebra.hpp"
#include "sovlab/trajectories.hpp"

namespace sovlab::cli {

namespace {

using superop::LindbladSpec;
using superop::Propagator;

HermitianOperator random_hermitian(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = cplx(n(rng), n(rng));
  }
  return HermitianOperator::symmetrized(m);
}

LindbladSpec random_spec(std::mt19937_64& rng, Eigen::Index d) {
  std::uniform_real_distribution<double> g(0.1, 1.0);
  auto h = random_hermitian(rng, d);
  auto l = random_hermitian(rng, d);
  return LindbladSpec(h, l, g(rng));
}

CheckResult at_most(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

CheckResult propagation_check(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto spec = random_spec(rng, 4);
    const auto a = random_hermitian(rng, 4);
    const Propagator spectral(spec);
    const Propagator ode(spec, {superop::PropagationMethod::ode, 1e-4, 1e10});
    for (double t : {0.1, 1.0}) {
      worst = std::max(worst, max_abs(spectral.apply(a.matrix(), t) - ode.apply(a.matrix(), t)));
    }
  }
  return at_most("propagation_spectral_vs_ode", worst, 1e-7);
}

std::vector<CheckResult> residual_checks(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0, flipped = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 5; ++k) {
    const auto spec = random_spec(rng, 3);
    const auto a = random_hermitian(rng, 3);
    const Propagator prop(spec);
    worst = std::max(worst, sov::sov_rhs_residual(prop, a, 0.5, 1e-4));
    flipped = std::min(flipped, sov::sov_rhs_residual(prop, a, 0.5, 1e-4, sov::SourceSign::flipped));
  }
  return {at_most("sov_rhs_residual", worst, 1e-6),
          {"mutation_flipped_source_detected", flipped > 1e-6, flipped, 1e-6,
           "smallest residual with the source sign reversed"}};
}

CheckResult positivity_check() {
  const auto s = spin::SpinSpec::from_spin(3.0);
  double worst = std::numeric_limits<double>::infinity();
  for (double omega : {0.5, 1.0, 3.0}) {
    for (double gamma : {0.5, 2.0}) {
      const auto h = spin::lmg_hamiltonian(s, omega);
      const Propagator prop(LindbladSpec(h, h, gamma));
      const auto a = spin::spin_combination(s, 1.0, 1.0, 1.0);
      for (double t : {0.05, 1.0, 10.0}) {
        const auto m = sov::exact_sov(prop, a, t);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m.matrix(), Eigen::EigenvaluesOnly);
        worst = std::min(worst, es.eigenvalues()(0));
      }
    }
  }
  return {"sov_positivity", worst >= -1e-9, worst, -1e-9, "minimum SOV eigenvalue"};
}

CheckResult sov_otoc_identity_check(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto spec = random_spec(rng, 4);
    const auto a = random_hermitian(rng, 4);
    const Propagator prop(spec);
    const double dt = 1e-4;
    std::vector<double> times, traces;
    for (int i = 0; i <= 20; ++i) {
      times.push_back(0.3 + dt * i);
      traces.push_back(sov::exact_sov(prop, a, times.back()).matrix().trace().real());
    }
    const auto fd = otoc::otoc_from_sov(traces, times.front(), dt, spec.gamma, 4);
    const auto direct = otoc::dissipative_otoc(prop, a, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (direct.values[i] > 1e-10) {
        worst = std::max(worst, std::abs(fd.values[i] - direct.values[i]) / direct.values[i]);
      }
    }
  }
  return at_most("sov_otoc_identity", worst, 1e-6, "relative");
}

std::vector<CheckResult> closed_form_checks() {
  const auto s = spin::SpinSpec::from_spin(3.0);
  const auto h = spin::lmg_hamiltonian(s, 1.0);
  const auto a = spin::spin_combination(s, 1.0, 1.0, 1.0);
  const double gamma = 0.7;
  const Propagator prop(LindbladSpec(h, h, gamma), {superop::PropagationMethod::ode, 1e-4, 1e10});
  const std::vector<double> times{0.0, 0.1, 0.5, 1.0};
  const auto cf = otoc::commuting_otoc_closed_form(a, h, h, gamma, times);
  const auto direct = otoc::dissipative_otoc(prop, a, times);
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    worst = std::max(worst, std::abs(cf.values[i] - direct.values[i]));
  }

  CMatrix sz(2, 2), sx(2, 2);
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  const HermitianOperator l(sz), x(sx), h2(0.3 * sz);
  const double g2 = 0.4;
  const auto two = otoc::commuting_otoc_closed_form(x, h2, l, g2, times);
  double worst2 = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    worst2 = std::max(worst2, std::abs(two.values[i] - 4.0 * std::exp(-8.0 * g2 * times[i])));
  }
  return {at_most("commuting_closed_form", worst, 1e-9), at_most("two_level_benchmark", worst2, 1e-10)};
}

std::vector<CheckResult> uncertainty_and_swap(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double order = 0.0, imag = 0.0;
  for (int k = 0; k < 30; ++k) {
    const auto spec = random_spec(rng, 3);
    const auto a = random_hermitian(rng, 3);
    const auto b = random_hermitian(rng, 3);
    const auto r = random_hermitian(rng, 3);
    const CMatrix rho0 = r.matrix() * r.matrix();
    const CMatrix rho = rho0 / rho0.trace();
    const Propagator prop(spec);
    const auto u = sov::uncertainty_check(prop, a, b, rho, 0.7);
    const double scale = std::max(1.0, u.lhs);
    order = std::max({order, (u.mid - u.lhs) / scale, (u.rhs - u.mid) / scale});
    imag = std::max({imag, std::abs(u.d_plus.imag()) / scale, std::abs(u.d_minus.real()) / scale});
  }
  double swap = 0.0;
  for (Eigen::Index d = 1; d <= 4; ++d) {
    const auto x = random_hermitian(rng, d), y = random_hermitian(rng, d);
    swap = std::max(swap, sov::swap_product_check(x.matrix(), y.matrix()));
  }
  return {at_most("uncertainty_ordering", order, 1e-9),
          at_most("uncertainty_d_plus_real_d_minus_imaginary", imag, 1e-10),
          at_most("swap_identity", swap, 1e-12)};
}

CheckResult hs_check() {
  double worst = 0.0;
  for (double S : {0.5, 1.0, 1.5}) {
    const auto s = spin::SpinSpec::from_spin(S);
    const auto ops = spin::spin_operators(s);
    const HermitianOperator* v[] = {&ops.x, &ops.y, &ops.z};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        worst = std::max(worst, std::abs(spin::hs_inner(*v[i], *v[j], s) - (i == j ? 1.0 : 0.0)));
      }
    }
  }
  return at_most("hs_orthonormal_spin_components", worst, 1e-12);
}

CheckResult variance_gap_check(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto spec = random_spec(rng, 3);
    const auto a = random_hermitian(rng, 3);
    CVector psi = random_hermitian(rng, 3).matrix().col(0);
    psi.normalize();
    const auto g = sov::quantum_variance_gap(Propagator(spec), a, psi, 0.4);
    worst = std::max(worst, std::abs(g.direct - g.projector));
  }
  return at_most("variance_gap_projector_form", worst, 1e-10);
}

CheckResult van_kampen_check() {
  double worst = 0.0;
  for (double omega = 0.1; omega <= 2.0; omega += 0.1) {
    for (double gamma : {0.0, 0.25, 0.5, 1.5}) {
      const double mu2 = 2 * omega - omega * omega;
      worst = std::max(worst, std::abs(classical::van_kampen_matrix(omega, gamma).max_eigenvalue -
                                       (std::sqrt(mu2) - gamma * mu2)));
    }
  }
  return at_most("van_kampen_closed_form", worst, 1e-10);
}

CheckResult strong_order_check(std::uint64_t seed) {
  const double mu = 0.5, sigma = 0.8, x0 = 1.0, T = 1.0;
  const double dts[] = {1e-2, 3e-3, 1e-3, 3e-4};
  const int paths = 200;
  std::vector<double> err(std::size(dts), 0.0);
  auto a = [&](double x) { return mu * x; };
  auto b = [&](double x) { return sigma * x; };
  for (int p = 0; p < paths; ++p) {
    // Finest Brownian path, summed up for the coarser steps.
    const double fine = 1e-4;
    const auto n_fine = static_cast<std::size_t>(std::llround(T / fine));
    const auto path = traj::sample_noise_path(derive_seed(seed, p), fine, n_fine);
    double w = 0.0;
    for (double dw : path.increments) w += dw;
    const double exact = x0 * std::exp((mu - 0.5 * sigma * sigma) * T + sigma * w);
    for (std::size_t k = 0; k < std::size(dts); ++k) {
      const auto ratio = static_cast<std::size_t>(std::llround(dts[k] / fine));
      double x = x0;
      // The last step is shortened when dt does not divide T.
      for (std::size_t i = 0; i < n_fine; i += ratio) {
        const std::size_t end = std::min(n_fine, i + ratio);
        double dw = 0.0;
        for (std::size_t j = i; j < end; ++j) dw += path.increments[j];
        x = classical::sde_step_order1(a, b, x, fine * static_cast<double>(end - i), dw);
      }
      err[k] += std::abs(x - exact) / paths;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(std::size(dts));
  for (std::size_t k = 0; k < std::size(dts); ++k) {
    const double lx = std::log(dts[k]), ly = std::log(err[k]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {"sde_strong_order", std::abs(slope - 1.0) <= 0.15, slope, 0.15, "slope, tolerance about 1"};
}

CheckResult energy_check() {
  const classical::ClassicalSpec spec(3.0, 0.0);
  const classical::PhaseState x0{0.01, 0.0};
  classical::SDEConfig cfg;
  cfg.dt = 1e-4;
  cfg.n_steps = 200000;
  const auto path = classical::integrate_path(spec, x0, cfg, 1000);
  double worst = 0.0;
  const double h0 = classical::classical_hamiltonian(spec.omega, x0);
  for (const auto& s : path.samples) {
    worst = std::max(worst, std::abs(classical::classical_hamiltonian(spec.omega, s) - h0));
  }
  return at_most("energy_conservation_gamma0", worst, 1e-5);
}

CheckResult benettin_delta_check(std::uint64_t seed, unsigned threads) {
  const classical::ClassicalSpec spec(1.0, 0.25);
  classical::SDEConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_steps = 5000;
  cfg.seed = seed;
  classical::BenettinOptions o;
  o.realizations = 40;
  o.threads = threads;
  double worst = 0.0;
  o.delta0 = 1e-8;
  const auto ref = classical::lyapunov_benettin(spec, cfg, o);
  for (double d0 : {1e-6, 1e-10}) {
    o.delta0 = d0;
    const auto e = classical::lyapunov_benettin(spec, cfg, o);
    worst = std::max(worst, std::abs(e.value - ref.value) / std::hypot(e.std_error, ref.std_error));
  }
  return at_most("benettin_delta0_invariance", worst, 1.0, "difference in combined standard errors");
}

std::vector<CheckResult> ensemble_checks(std::uint64_t seed, unsigned threads) {
  const auto s = spin::SpinSpec::from_spin(1.0);
  const auto h = spin::lmg_hamiltonian(s, 1.0);
  const auto a = spin::spin_combination(s, 1.0, 1.0, 1.0);
  const LindbladSpec spec(h, h, 1.0);
  const Propagator prop(spec);
  const std::vector<double> times{0.2, 0.5};
  traj::EnsembleSpec ens;
  ens.trajectories = 400;
  ens.dt = 1e-3;
  ens.t_max = 0.5;
  double worst_z = 0.0;
  bool identical = true;
  for (int k = 0; k < 5; ++k) {
    ens.base_seed = derive_seed(seed, 1000 + k);
    ens.threads = threads;
    const auto ms = traj::ensemble_moments(a, spec, ens, times);
    if (k == 0) {
      auto e1 = ens;
      e1.threads = 1;
      const auto ms1 = traj::ensemble_moments(a, spec, e1, times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        identical = identical && ms1.second_op[i].matrix() == ms.second_op[i].matrix() &&
                    ms1.mean_op[i].matrix() == ms.mean_op[i].matrix();
      }
    }
    const auto emp = traj::empirical_sov(ms);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const CMatrix diff = emp[i].matrix() - sov::exact_sov(prop, a, times[i]).matrix();
      for (Eigen::Index r = 0; r < diff.rows(); ++r) {
        for (Eigen::Index c = 0; c < diff.cols(); ++c) {
          const cplx se = ms.sov_stderr[i](r, c);
          if (se.real() > 0) worst_z = std::max(worst_z, std::abs(diff(r, c).real()) / se.real());
          if (se.imag() > 0) worst_z = std::max(worst_z, std::abs(diff(r, c).imag()) / se.imag());
        }
      }
    }
  }
  return {at_most("monte_carlo_sov_five_seeds", worst_z, 4.0, "max entrywise |z|"),
          {"ensemble_thread_independence", identical, identical ? 0.0 : 1.0, 0.0,
           "1 worker vs configured workers"}};
}

}  // namespace

std::vector<CheckResult> run_property_suite(std::uint64_t base_seed, unsigned threads) {
  std::vector<CheckResult> out;
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      out.push_back({name, false, std::nan(""), std::nan(""), std::string("threw: ") + e.what()});
    }
  };
  auto add = [&](auto v) {
    if constexpr (std::is_same_v<decltype(v), CheckResult>) out.push_back(std::move(v));
    else out.insert(out.end(), v.begin(), v.end());
  };
  guarded("propagation_spectral_vs_ode", [&] { add(propagation_check(derive_seed(base_seed, 1))); });
  guarded("sov_rhs_residual", [&] { add(residual_checks(derive_seed(base_seed, 2))); });
  guarded("sov_positivity", [&] { add(positivity_check()); });
  guarded("sov_otoc_identity", [&] { add(sov_otoc_identity_check(derive_seed(base_seed, 3))); });
  guarded("commuting_closed_form", [&] { add(closed_form_checks()); });
  guarded("uncertainty_and_swap", [&] { add(uncertainty_and_swap(derive_seed(base_seed, 4))); });
  guarded("hs_orthonormal_spin_components", [&] { add(hs_check()); });
  guarded("variance_gap_projector_form", [&] { add(variance_gap_check(derive_seed(base_seed, 5))); });
  guarded("van_kampen_closed_form", [&] { add(van_kampen_check()); });
  guarded("sde_strong_order", [&] { add(strong_order_check(derive_seed(base_seed, 6))); });
  guarded("energy_conservation_gamma0", [&] { add(energy_check()); });
  guarded("benettin_delta0_invariance", [&] { add(benettin_delta_check(derive_seed(base_seed, 7), threads)); });
  guarded("monte_carlo_sov_five_seeds", [&] { add(ensemble_checks(base_seed, threads)); });
  return out;
}

Table checks_table(const std::vector<CheckResult>& checks) {
  Table t{"validation", {"check", "status", "value", "threshold", "detail"}, {}};
  for (const auto& c : checks) {
    t.add({c.name, std::string(c.pass ? "pass" : "fail"), c.value, c.threshold, c.detail});
  }
  return t;
}

}  // namespace sovlab::cli
