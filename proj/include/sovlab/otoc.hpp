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

#include "sovlab/sov.hpp"
#include "sovlab/superop.hpp"

namespace sovlab::otoc {

using sov::FitWindow;
using superop::Propagator;

// per_dim divides by the Hilbert-space dimension N, the normalization of the
// infinite-temperature OTOC; unnormalized keeps the bare trace.
enum class Normalization { per_dim, unnormalized };

struct OTOCSeries {
  std::vector<double> times;
  std::vector<double> values;
  Normalization normalization = Normalization::per_dim;
};

/// C_t = -Tr([L, exp(tL)[A]]^2) / N.
OTOCSeries dissipative_otoc(const Propagator& prop, const HermitianOperator& a,
                            std::span<const double> times,
                            Normalization norm = Normalization::per_dim);

/// C_t = (1/(2 gamma N)) d Tr(SOV)/dt from a trace series on a uniform grid
/// with spacing dt. Second-order central differences inside, second-order
/// one-sided stencils at the ends. Requires gamma > 0 and >= 3 samples.
OTOCSeries otoc_from_sov(std::span<const double> sov_trace, double t0, double dt,
                         double gamma, Eigen::Index n_dim,
                         Normalization norm = Normalization::per_dim);

/// Short-time decay C_t ~ C0 exp(-t / tau_D) with
///   C0 = -Tr([L, A]^2)/N,  1/tau_D = 2 gamma Tr([L,[L,A]]^2) / (C0 N).
/// When [L,[L,A]] = 0 the decay time is infinite and `finite` is false.
struct DissipationAnalysis {
  double c0 = 0.0;
  double tau_d = 0.0;
  bool finite = true;

  double model(double t) const;
};

DissipationAnalysis dissipation_time(const HermitianOperator& a,
                                     const HermitianOperator& jump,
                                     double gamma);

/// Sum_{m,n} (l_m - l_n)^2 exp(-2 gamma (l_m - l_n)^2 t) |A_nm|^2 in the
/// common eigenbasis of H0 and L, divided by N under per_dim. Throws if
/// H0 and L do not commute to 1e-10.
OTOCSeries commuting_otoc_closed_form(const HermitianOperator& a,
                                      const HermitianOperator& h0,
                                      const HermitianOperator& jump, double gamma,
                                      std::span<const double> times,
                                      Normalization norm = Normalization::per_dim);

struct LyapunovFit {
  double lambda_q = 0.0;
  double epsilon = 0.0;  // exp(intercept)
  FitWindow window;
  double residual = 0.0;  // RMS of ln C_t about the fit
  std::size_t samples = 0;
};

/// Least-squares slope of ln C_t against t over the window. Needs >= 2
/// samples and C_t > 0 throughout.
LyapunovFit lyapunov_from_otoc(const OTOCSeries& series, FitWindow window);

}  // namespace sovlab::otoc
