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

#include <span>
#include <vector>

#include "sovlab/spin_algebra.hpp"
#include "sovlab/superop.hpp"

namespace sovlab::sov {

using superop::LindbladSpec;
using superop::Propagator;

// Eigenvalues in [-kClipTolerance, 0) are roundoff and clip to zero; anything
// more negative is a hard error.
inline constexpr double kClipTolerance = 1e-9;

/// exp(tL)[A^2] - (exp(tL)[A])^2. Throws NumericalError if the result has an
/// eigenvalue below -kClipTolerance.
HermitianOperator exact_sov(const Propagator& prop, const HermitianOperator& a,
                            double t);
HermitianOperator exact_sov(const LindbladSpec& spec, const HermitianOperator& a,
                            double t);

// The source term of the SOV equation of motion. `flipped` reverses its sign;
// it exists so the validation suite can confirm the residual check catches a
// wrong sign.
enum class SourceSign { correct, flipped };

/// max-norm of [central difference of the SOV at t with half-width dt_fd]
/// minus [L(SOV) - 2 gamma [L, <A_t>]^2].
double sov_rhs_residual(const Propagator& prop, const HermitianOperator& a,
                        double t, double dt_fd,
                        SourceSign sign = SourceSign::correct);

struct SOVSeries {
  std::vector<double> times;
  std::vector<HermitianOperator> sov;
  RMatrix eigvals;               // row = time, ascending within a row
  std::vector<CMatrix> eigvecs;  // columns match eigvals ordering
  // (time index, k) where Lambda_{k+1} - Lambda_k < 1e-10.
  std::vector<std::pair<std::size_t, std::size_t>> near_crossings;
};

/// Ascending eigensystems per time. Each eigenvector's largest-magnitude
/// component is made real positive; then its sign is flipped if that
/// increases the overlap with the same-rank vector at the previous time.
SOVSeries sov_eigensystem(std::span<const double> times,
                          std::vector<HermitianOperator> sovs);

SOVSeries exact_sov_series(const Propagator& prop, const HermitianOperator& a,
                           std::span<const double> times);

struct FitWindow {
  double begin = 0.0;
  double end = 0.0;
};

// [0.01, 0.1]/gamma and [0.1, 1]/gamma.
FitWindow early_window(double gamma);
FitWindow mid_window(double gamma);

struct TransportFit {
  std::size_t mode = 0;
  FitWindow window;
  double exponent = 0.0;   // slope of log Lambda_k vs log t
  double intercept = 0.0;  // log prefactor
  double residual = 0.0;   // RMS of the log-log fit
  std::size_t samples = 0;
};

/// Needs >= 10 samples inside the window, all strictly positive.
TransportFit transport_exponent_fit(const SOVSeries& series, std::size_t k,
                                    FitWindow window);

struct MinSovState {
  CVector state;
  double t_max = 0.0;
  double overlap = 0.0;  // |<v0(t_max)|v0(t_max/2)>|
  bool converged = false;
  // The SOV vanishes identically (e.g. gamma = 0); every state qualifies.
  bool degenerate = false;
  double lambda0 = 0.0;
};

/// Lowest SOV eigenvector at t_max. Convergence means the overlap with the
/// lowest eigenvector at t_max/2 exceeds 1 - conv_tol. Non-convergence is
/// reported through `converged`, never silently.
MinSovState min_sov_state(const Propagator& prop, const HermitianOperator& a,
                          double t_max, double conv_tol = 1e-6);

/// exp(tL)[AB] - exp(tL)[A] exp(tL)[B]; not Hermitian in general.
CMatrix covariance(const Propagator& prop, const HermitianOperator& a,
                   const HermitianOperator& b, double t);

struct UncertaintyReport {
  double lhs = 0.0;  // Tr(dA^2 rho) Tr(dB^2 rho)
  double mid = 0.0;  // |Tr(dAB rho)|^2
  double rhs = 0.0;  // (D+^2 - D-^2)/4
  cplx d_plus;
  cplx d_minus;
};

/// Throws Error unless rho0 is Hermitian, PSD (to -1e-12) and unit trace
/// (to 1e-10).
UncertaintyReport uncertainty_check(const Propagator& prop,
                                    const HermitianOperator& a,
                                    const HermitianOperator& b,
                                    const CMatrix& rho0, double t);

struct VarianceGap {
  double direct = 0.0;     // Var(A_t, psi) - <psi|SOV|psi>
  double projector = 0.0;  // <psi|A_t Q A_t|psi>, Q = 1 - |psi><psi|
};

VarianceGap quantum_variance_gap(const Propagator& prop,
                                 const HermitianOperator& a,
                                 const CVector& psi0, double t);

// max|Tr_2((X kron Y) Swap) - XY|, with the swap and partial trace built
// explicitly on the doubled space.
double swap_product_check(const CMatrix& x, const CMatrix& y);

// Principal square root via eigendecomposition, clipping per kClipTolerance.
HermitianOperator psd_sqrt(const HermitianOperator& m);

struct SpinCoefficients {
  cplx identity;
  cplx x;
  cplx y;
  cplx z;
};

struct SovProjection {
  SpinCoefficients variance;   // (SOV, X)
  SpinCoefficients deviation;  // (sqrt(SOV), X)
};

SovProjection sov_projection(const HermitianOperator& sov,
                             const spin::SpinSpec& spec);

}  // namespace sovlab::sov
