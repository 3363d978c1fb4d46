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

#include "sovlab/spin_algebra.hpp"

#include <cmath>
#include <limits>

namespace sovlab::spin {

SpinSpec SpinSpec::from_twice_spin(int two_s) {
  if (two_s < 0) throw Error("SpinSpec: 2S must be non-negative");
  return SpinSpec(two_s);
}

SpinSpec SpinSpec::from_spin(double s) {
  const double twice = 2.0 * s;
  const double rounded = std::round(twice);
  if (!(std::abs(twice - rounded) < 1e-12) || rounded < 0) {
    throw Error("SpinSpec: S must be a non-negative half-integer");
  }
  return SpinSpec(static_cast<int>(rounded));
}

CMatrix raising_operator(const SpinSpec& spec) {
  const int d = spec.dim();
  const double s = spec.S();
  CMatrix sp = CMatrix::Zero(d, d);
  // Column j holds |m_j>, m_j = S - j; S+|m> = sqrt(S(S+1) - m(m+1)) |m+1>.
  for (int j = 1; j < d; ++j) {
    const double m = s - j;
    sp(j - 1, j) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  return sp;
}

SpinOperators spin_operators(const SpinSpec& spec) {
  const int d = spec.dim();
  const CMatrix sp = raising_operator(spec);
  const CMatrix sm = sp.adjoint();
  CMatrix sz = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) sz(j, j) = spec.S() - j;
  return SpinOperators{
      HermitianOperator(0.5 * (sp + sm)),
      HermitianOperator((sp - sm) / (2.0 * kI)),
      HermitianOperator(sz),
  };
}

HermitianOperator total_spin_squared(const SpinSpec& spec) {
  const auto s = spin_operators(spec);
  return HermitianOperator::symmetrized(s.x.matrix() * s.x.matrix() +
                                        s.y.matrix() * s.y.matrix() +
                                        s.z.matrix() * s.z.matrix());
}

HermitianOperator lmg_hamiltonian(const SpinSpec& spec, double omega) {
  if (spec.two_s() == 0) {
    throw Error("lmg_hamiltonian: S = 0 has no particles (N = 2S = 0)");
  }
  const auto s = spin_operators(spec);
  const double n = spec.particles();
  CMatrix h = omega * s.z.matrix() - (2.0 / n) * (s.x.matrix() * s.x.matrix());
  return HermitianOperator::symmetrized(h);
}

HermitianOperator spin_combination(const SpinSpec& spec, double cx, double cy,
                                   double cz) {
  const auto s = spin_operators(spec);
  return HermitianOperator::symmetrized(cx * s.x.matrix() + cy * s.y.matrix() +
                                        cz * s.z.matrix());
}

CoherentState su2_coherent_state(const SpinSpec& spec, cplx zeta) {
  if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag())) {
    throw NumericalError("su2_coherent_state: zeta must be finite");
  }
  const int n = spec.two_s();
  CVector amp = CVector::Zero(spec.dim());
  const double r = std::abs(zeta);
  if (r == 0.0) {
    amp(n) = 1.0;  // |S, -S> sits at the last index
    return CoherentState{zeta, spec, amp};
  }
  // |c_k| = r^k sqrt(C(2S,k)) / (1 + r^2)^S for the state |S, -S + k>.
  const double log_r = std::log(r);
  const double log_norm = 0.5 * n * std::log1p(r * r);
  const double arg = std::arg(zeta);
  for (int k = 0; k <= n; ++k) {
    const double log_binom =
        std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    const double log_mag = k * log_r + 0.5 * log_binom - log_norm;
    amp(n - k) = std::polar(std::exp(log_mag), k * arg);
  }
  // Renormalize away the residual rounding of the log-space sum.
  amp /= amp.norm();
  return CoherentState{zeta, spec, amp};
}

cplx zeta_from_angles(double theta, double phi) {
  return -std::tan(0.5 * theta) * std::exp(-kI * phi);
}

cplx hs_inner(const HermitianOperator& a, const HermitianOperator& b,
              const SpinSpec& spec) {
  if (a.dim() != b.dim() || a.dim() != spec.dim()) {
    throw DimensionError("hs_inner: dimension mismatch");
  }
  if (spec.two_s() == 0) {
    throw DimensionError("hs_inner: normalization undefined for S = 0");
  }
  const double s = spec.S();
  const double norm = 3.0 / (s * (s + 1.0) * (2.0 * s + 1.0));
  return norm * (a.matrix().adjoint() * b.matrix()).trace();
}

}  // namespace sovlab::spin
