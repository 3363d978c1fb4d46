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

#include "oracles.hpp"
#include "sovlab/spin_algebra.hpp"
#include "sovlab/superop.hpp"

using namespace sovlab;
using namespace sovlab::superop;

TEST_SUITE("superop") {

TEST_CASE("row-major vectorization convention") {
  std::mt19937_64 rng(1);
  const CMatrix x = oracle::random_hermitian(rng, 3) + CMatrix::Identity(3, 3) * kI;
  const CMatrix y = oracle::random_hermitian(rng, 3);
  const CMatrix a = oracle::random_hermitian(rng, 3) * kI + oracle::random_hermitian(rng, 3);
  CHECK(max_abs(kron(x, y.transpose()) * vectorize(a) - vectorize(x * a * y)) < 1e-12);
  CHECK(a(0, 1) == vectorize(a)(1));
  CHECK(max_abs(devectorize(vectorize(a)) - a) == 0.0);
  CHECK_THROWS(devectorize(CVector::Zero(5)));
}

TEST_CASE("generator matrix matches the commutator form and kills the identity") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const LindbladSpec spec(HermitianOperator(oracle::random_hermitian(rng, 4)),
                            HermitianOperator(oracle::random_hermitian(rng, 4)), 0.37);
    const CMatrix a = oracle::random_hermitian(rng, 4);
    const auto sup = build_adjoint_lindbladian(spec);
    const CMatrix ref = oracle::adjoint_rhs(spec.h0.matrix(), spec.jump.matrix(), 0.37, a);
    CHECK(oracle::max_abs(sup.apply(a) - ref) < 1e-11);
    CHECK(oracle::max_abs(apply_adjoint_lindbladian(spec, a) - ref) < 1e-11);
    CHECK(oracle::max_abs(sup.apply(CMatrix::Identity(4, 4))) < 1e-12);
  }
}

TEST_CASE("spec validation") {
  const auto h = HermitianOperator::identity(2);
  CHECK_THROWS(LindbladSpec(h, h, -0.1));
  CHECK_THROWS(LindbladSpec(h, HermitianOperator::identity(3), 0.1));
  CHECK_THROWS(LindbladSpec(h, h, std::nan("")));
}

TEST_CASE("spectral and ODE routes agree with an independent RK4") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const CMatrix h = oracle::random_hermitian(rng, 4), l = oracle::random_hermitian(rng, 4);
    const double g = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const LindbladSpec spec{HermitianOperator(h), HermitianOperator(l), g};
    const CMatrix a = oracle::random_hermitian(rng, 4);
    const Propagator spectral(spec);
    const Propagator ode(spec, {PropagationMethod::ode, 1e-4, 1e10});
    CHECK(spectral.method() == PropagationMethod::spectral);
    for (double t : {0.1, 1.0}) {
      const CMatrix ref = oracle::rk4(h, l, g, a, t, 20000);
      CHECK(oracle::max_abs(spectral.apply(a, t) - ref) < 1e-8);
      CHECK(oracle::max_abs(ode.apply(a, t) - ref) < 1e-8);
    }
  }
}

TEST_CASE("commuting route matches the general route") {
  const auto s = spin::SpinSpec::from_spin(2.0);
  const auto h = spin::lmg_hamiltonian(s, 1.3);
  const auto a = spin::spin_combination(s, 0.3, -1.0, 0.7);
  const LindbladSpec spec(h, h, 0.8);
  const Propagator fast(spec);
  CHECK(fast.uses_common_eigenbasis());
  for (double t : {0.0, 0.2, 3.0}) {
    const CMatrix ref = oracle::rk4(h.matrix(), h.matrix(), 0.8, a.matrix(), t, std::max(1, int(t * 4000)));
    CHECK(oracle::max_abs(fast.apply(a.matrix(), t) - ref) < 1e-9);
  }
}

TEST_CASE("unitality, trace preservation and gamma = 0") {
  std::mt19937_64 rng(4);
  const CMatrix h = oracle::random_hermitian(rng, 3), l = oracle::random_hermitian(rng, 3);
  const Propagator p(LindbladSpec(HermitianOperator(h), HermitianOperator(l), 0.5));
  CHECK(oracle::max_abs(p.apply(CMatrix::Identity(3, 3), 2.0) - CMatrix::Identity(3, 3)) < 1e-10);
  // Adjoint dynamics with Hermitian jumps preserve the trace of A.
  const CMatrix a = oracle::random_hermitian(rng, 3);
  CHECK(std::abs(p.apply(a, 1.5).trace() - a.trace()) < 1e-10);

  const Propagator u(LindbladSpec(HermitianOperator(h), HermitianOperator(l), 0.0));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CMatrix ut = es.eigenvectors() *
                     (es.eigenvalues().array() * cplx(0, -1.0)).exp().matrix().asDiagonal() *
                     es.eigenvectors().adjoint();
  CHECK(oracle::max_abs(u.apply(a, 1.0) - ut.adjoint() * a * ut) < 1e-10);
}

TEST_CASE("propagate returns a Hermitian operator") {
  std::mt19937_64 rng(5);
  const LindbladSpec spec(HermitianOperator(oracle::random_hermitian(rng, 3)),
                          HermitianOperator(oracle::random_hermitian(rng, 3)), 0.2);
  double asym = -1.0;
  const auto at = Propagator(spec).propagate(HermitianOperator(oracle::random_hermitian(rng, 3)), 0.7, &asym);
  CHECK(asym >= 0.0);
  CHECK(asym < 1e-10);
  CHECK(hermiticity_residual(at.matrix()) == 0.0);
}

}
