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

#include <optional>

#include "sovlab/operator.hpp"

namespace sovlab::superop {

/// Generator data for i[H0, .] - gamma [L, [L, .]]: a single Hermitian jump
/// operator L coupled to white noise of strength gamma.
struct LindbladSpec {
  LindbladSpec(HermitianOperator h0, HermitianOperator jump, double gamma);

  HermitianOperator h0;
  HermitianOperator jump;
  double gamma;

  Eigen::Index dim() const { return h0.dim(); }
};

// Vectorization is row-major: vec(A)[i*d + j] = A(i, j), so that
// vec(X A Y) = (X kron Y^T) vec(A).
CVector vectorize(const CMatrix& a);
CMatrix devectorize(const CVector& v);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Dense d^2 x d^2 matrix of the adjoint generator.
class SuperoperatorMatrix {
 public:
  explicit SuperoperatorMatrix(CMatrix m);
  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  CMatrix apply(const CMatrix& a) const;

 private:
  CMatrix m_;
};

SuperoperatorMatrix build_adjoint_lindbladian(const LindbladSpec& spec);

// i[H0, A] - gamma [L, [L, A]] by direct matrix products.
CMatrix apply_adjoint_lindbladian(const LindbladSpec& spec, const CMatrix& a);

enum class PropagationMethod { spectral, ode };

struct PropagationConfig {
  PropagationMethod method = PropagationMethod::spectral;
  double ode_dt = 1e-3;
  double spectral_condition_limit = 1e10;
};

/// Computes exp(t L^dagger)[A].
///
/// The spectral route diagonalizes the generator once at construction and is
/// then O(d^4) per time point. When [H0, L] = 0 the generator is diagonal in
/// the common eigenbasis, which is found from a d x d Hermitian problem
/// instead of the d^2 x d^2 one. When the eigenvector matrix has a 1-norm
/// condition number above spectral_condition_limit the propagator falls back
/// to fixed-step RK4 on the commutator form.
///
/// Instances are immutable after construction and safe to share between
/// threads.
class Propagator {
 public:
  explicit Propagator(LindbladSpec spec, PropagationConfig cfg = {});

  const LindbladSpec& spec() const { return spec_; }
  const PropagationConfig& config() const { return cfg_; }
  PropagationMethod method() const { return method_; }
  bool uses_common_eigenbasis() const { return commuting_.has_value(); }
  // 1-norm condition of the eigenvector matrix; 1 for the commuting route and
  // NaN when the ODE route was requested directly.
  double condition_number() const { return condition_; }

  // Works on any square matrix (products like AB are not Hermitian).
  CMatrix apply(const CMatrix& a, double t) const;

  // Hermitian result after symmetrization. Throws NumericalError when the
  // discarded asymmetry exceeds 1e-9 * max(1, max|A_t|).
  HermitianOperator propagate(const HermitianOperator& a, double t,
                              double* asymmetry = nullptr) const;

 private:
  struct CommonBasis {
    CMatrix basis;  // columns are common eigenvectors
    RVector energies;
    RVector jump_values;
  };
  struct Spectral {
    CVector eigenvalues;
    CMatrix vectors;
    CMatrix inverse;
  };

  CMatrix apply_ode(const CMatrix& a, double t) const;

  LindbladSpec spec_;
  PropagationConfig cfg_;
  PropagationMethod method_;
  double condition_ = 1.0;
  std::optional<CommonBasis> commuting_;
  std::optional<Spectral> spectral_;
};

HermitianOperator propagate(const LindbladSpec& spec, const HermitianOperator& a,
                            double t, const PropagationConfig& cfg = {});

// Finds a basis diagonalizing both operators when they commute to within
// 1e-10 (scaled). Returns nullopt otherwise, or when an accidental
// degeneracy of the mixing combination prevents a joint basis.
struct JointEigenbasis {
  CMatrix basis;
  RVector first;
  RVector second;
};
std::optional<JointEigenbasis> joint_eigenbasis(const HermitianOperator& a,
                                                const HermitianOperator& b);

}  // namespace sovlab::superop
