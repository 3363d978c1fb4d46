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

#include "sovlab/operator.hpp"

namespace sovlab::spin {

/// Spin quantum number stored as the integer 2S so half-integers are exact.
/// Basis ordering everywhere in the library is the Sz eigenbasis with m
/// descending: index 0 is m = S, index 2S is m = -S.
class SpinSpec {
 public:
  static SpinSpec from_twice_spin(int two_s);
  // Accepts S in {0, 1/2, 1, ...}; anything else throws.
  static SpinSpec from_spin(double s);

  int two_s() const { return two_s_; }
  double S() const { return 0.5 * two_s_; }
  int dim() const { return two_s_ + 1; }
  // Number of spin-1/2 constituents, N = 2S.
  int particles() const { return two_s_; }

 private:
  explicit SpinSpec(int two_s) : two_s_(two_s) {}
  int two_s_ = 0;
};

struct SpinOperators {
  HermitianOperator x;
  HermitianOperator y;
  HermitianOperator z;
};

SpinOperators spin_operators(const SpinSpec& spec);

// S+ = Sx + i Sy in the descending-m basis (upper bidiagonal).
CMatrix raising_operator(const SpinSpec& spec);

HermitianOperator total_spin_squared(const SpinSpec& spec);

/// Omega Sz - (2/N) Sx^2 with N = 2S. Throws for S = 0.
HermitianOperator lmg_hamiltonian(const SpinSpec& spec, double omega);

// Real linear combination cx Sx + cy Sy + cz Sz.
HermitianOperator spin_combination(const SpinSpec& spec, double cx, double cy,
                                   double cz);

struct CoherentState {
  cplx zeta;
  SpinSpec spin;
  CVector amplitudes;
};

/// Normalized exp(zeta S+)|S,-S>. Amplitudes are built from log-binomials so
/// S = 20 and large |zeta| do not overflow.
CoherentState su2_coherent_state(const SpinSpec& spec, cplx zeta);

// zeta = -tan(theta/2) exp(-i phi), the stereographic chart of the sphere.
cplx zeta_from_angles(double theta, double phi);

/// Normalized Hilbert-Schmidt product Tr(A^dagger B) * 3/(S(S+1)(2S+1)),
/// under which (S_i, S_j) = delta_ij. Throws DimensionError on mismatch and
/// for S = 0, where the normalization is undefined.
cplx hs_inner(const HermitianOperator& a, const HermitianOperator& b,
              const SpinSpec& spec);

}  // namespace sovlab::spin
