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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sovlab/operator.hpp"
#include "sovlab/sov.hpp"

namespace sovlab::classical {

using sov::FitWindow;

/// Canonical pair of the classical LMG limit. The coherent-state chart
/// covers Q^2 + P^2 < 4.
struct PhaseState {
  double q = 0.0;
  double p = 0.0;

  bool in_chart() const { return q * q + p * p < 4.0; }
  // zeta = (Q - iP)/sqrt(4 - Q^2 - P^2); throws outside the chart.
  cplx zeta() const;
  Eigen::Vector2d vec() const { return {q, p}; }
  static PhaseState from(const Eigen::Vector2d& v) { return {v(0), v(1)}; }
};

struct ClassicalSpec {
  ClassicalSpec(double omega, double gamma);
  double omega;
  double gamma;
};

// (Omega/2) P^2 + (Omega/2 - 1) Q^2 + (Q^2 P^2 + Q^4)/4.
double classical_hamiltonian(double omega, PhaseState x);

// Hamilton's equations: dQ/dt = Omega P + Q^2 P / 2,
//                       dP/dt = -((Omega - 2) Q + Q P^2 / 2 + Q^3).
Eigen::Vector2d hamilton_rhs(double omega, const Eigen::Vector2d& x);
PhaseState hamilton_rhs(double omega, PhaseState x);

// Jacobian of hamilton_rhs at the origin.
Eigen::Matrix2d linearization_at_origin(double omega);

/// One step of the explicit strong order-1.0 scheme for the Ito SDE
/// dX = a(X) dt + b(X) dW with scalar noise:
///   Y' = Y + a dt + b dW + (b(Y + a dt + b sqrt(dt)) - b) (dW^2 - dt) / (2 sqrt(dt)).
/// State may be double or any Eigen vector.
template <class State, class Drift, class Diffusion>
State sde_step_order1(const Drift& a, const Diffusion& b, const State& y,
                      double dt, double dw) {
  const State an = a(y);
  const State bn = b(y);
  const double root = std::sqrt(dt);
  const State support = y + an * dt + bn * root;
  return y + an * dt + bn * dw + (b(support) - bn) * ((dw * dw - dt) / (2.0 * root));
}

// Step of the stochastic LMG: a = X_H, b = sqrt(2 gamma) X_H.
Eigen::Vector2d slmg_step(const ClassicalSpec& spec, const Eigen::Vector2d& x,
                          double dt, double dw);

struct SDEConfig {
  double dt = 1e-3;
  std::size_t n_steps = 20000;
  std::uint64_t seed = 0;

  double total_time() const { return dt * static_cast<double>(n_steps); }
};

struct PathOutcome {
  std::vector<PhaseState> samples;  // state after every `stride` steps, plus t = 0
  bool diverged = false;
  double divergence_time = 0.0;
};

/// Integrates one realization with noise from mt19937_64(seed). Leaving
/// |Q|, |P| <= bound or producing non-finite values stops the path and
/// records the divergence time.
PathOutcome integrate_path(const ClassicalSpec& spec, PhaseState x0,
                           const SDEConfig& cfg, std::size_t stride = 1,
                           double bound = 1e6);

enum class LyapunovMethod { van_kampen, benettin, sov_otoc };

struct LyapunovEstimate {
  double value = 0.0;
  double std_error = 0.0;
  LyapunovMethod method = LyapunovMethod::van_kampen;
  std::size_t realizations = 0;
  std::size_t blowups = 0;
  // Set when more than 10% of realizations blew up.
  bool unreliable = false;
  // False when the estimator does not apply (sov_otoc at gamma = 0).
  bool applicable = true;
};

struct VanKampenResult {
  Eigen::Matrix3d drift;      // acts on (Q^2, P^2, QP)
  Eigen::Matrix3d effective;  // drift - gamma drift^2
  double max_eigenvalue = 0.0;
};

/// Quadratic-moment matrix of the linearized LMG and its noise-corrected
/// generator. The reported eigenvalue is the largest real part of the
/// effective matrix over modes with non-zero drift eigenvalue; the
/// remaining mode is the conserved quadratic energy.
VanKampenResult van_kampen_matrix(double omega, double gamma);

/// sqrt(2 Omega - Omega^2) - gamma (2 Omega - Omega^2) for 0 < Omega <= 2,
/// the van_kampen_matrix eigenvalue otherwise.
LyapunovEstimate lyapunov_van_kampen(double omega, double gamma);

struct BenettinOptions {
  // Reference initial condition; the saddle itself by default.
  PhaseState x0{0.0, 0.0};
  double delta0 = 1e-8;
  double renorm_interval = 0.5;
  std::size_t realizations = 200;
  unsigned threads = 0;
  double blowup_bound = 1e6;
};

/// Twin-trajectory estimate with shared noise and periodic renormalization
/// of the separation back to delta0. The twin starts at x0 + (delta0, 0).
/// Realization r uses seed derive_seed(cfg.seed, r).
LyapunovEstimate lyapunov_benettin(const ClassicalSpec& spec,
                                   const SDEConfig& cfg,
                                   const BenettinOptions& opts = {});

// Finite-time exponent of one realization, NaN if it blew up.
double benettin_realization(const ClassicalSpec& spec, const SDEConfig& cfg,
                            const BenettinOptions& opts, std::uint64_t seed);

struct ClassicalSovOptions {
  double epsilon0 = 1e-3;
  std::size_t realizations = 1000;
  FitWindow fit_window{2.0, 8.0};
  // Spacing of the variance samples fed to the central difference.
  double sample_spacing = 0.1;
  unsigned threads = 0;
  double blowup_bound = 1e6;
};

struct ClassicalSovResult {
  LyapunovEstimate estimate;
  double epsilon = 0.0;
  std::vector<double> times;
  std::vector<double> variance;    // noise-ensemble variance of Q_t
  std::vector<double> derivative;  // central difference of variance
};

/// Exponent from the noise-ensemble variance of Q started at (epsilon0, 0):
/// slope of ln(d_t Var Q_t)/2 over the fit window, epsilon from the
/// intercept. Realizations that blow up are excluded at every time. At
/// gamma = 0 the variance vanishes and the estimate is flagged inapplicable.
/// Throws NumericalError when the derivative is non-positive in the window.
ClassicalSovResult lyapunov_from_classical_sov(const ClassicalSpec& spec,
                                               const SDEConfig& cfg,
                                               const ClassicalSovOptions& opts = {});

struct VarianceFit {
  double lambda = 0.0;
  double std_error = 0.0;  // from the regression slope
  double epsilon = 0.0;    // prefactor of d_t Var
  std::vector<double> derivative;  // central differences, NaN at the ends
};

/// Fits ln(d_t Var) = ln(epsilon) + 2 lambda t over `window` on a uniform
/// grid. Throws NumericalError when the derivative is non-positive inside
/// the window and Error when fewer than 3 samples fall in it.
VarianceFit fit_variance_growth(std::span<const double> times,
                                std::span<const double> variance, FitWindow window);

struct PhaseDiagramCell {
  double omega = 0.0;
  double gamma = 0.0;
  LyapunovEstimate estimate;
  std::string failure;  // non-empty when the cell could not be evaluated
};

/// Benettin exponent on the Omega x gamma grid, row-major in gamma (all
/// omegas for gammas[0] first). Cell i uses base seed derive_seed(cfg.seed, i)
/// and runs its realizations serially; cells run in parallel.
std::vector<PhaseDiagramCell> phase_diagram(std::span<const double> omegas,
                                            std::span<const double> gammas,
                                            const SDEConfig& cfg,
                                            const BenettinOptions& opts);

}  // namespace sovlab::classical
