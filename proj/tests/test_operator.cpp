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

#include "sovlab/operator.hpp"

using namespace sovlab;

TEST_SUITE("operator") {

TEST_CASE("hermitian construction accepts Hermitian input and rejects the rest") {
  CMatrix m(2, 2);
  m << 1.0, cplx(0.0, 2.0), cplx(0.0, -2.0), -1.0;
  CHECK_NOTHROW(HermitianOperator{m});
  m(0, 1) += 1e-6;
  CHECK_THROWS_AS(HermitianOperator{m}, NumericalError);
  CMatrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(HermitianOperator{rect}, DimensionError);
}

TEST_CASE("tolerance scales with the operator magnitude") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1e6;
  m(1, 0) = 1e6 + 1e-7;
  CHECK_NOTHROW(HermitianOperator{m});
}

TEST_CASE("symmetrized reports the discarded asymmetry") {
  CMatrix m(2, 2);
  m << 1.0, 2.0, 2.5, 0.0;
  double res = 0.0;
  const auto h = HermitianOperator::symmetrized(m, &res);
  CHECK(res == doctest::Approx(0.5));
  CHECK(h.matrix()(0, 1).real() == doctest::Approx(2.25));
}

TEST_CASE("Pauli commutator") {
  CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  sz << 1, 0, 0, -1;
  CHECK(max_abs(commutator(sx, sy) - cplx(0, 2) * sz) < 1e-15);
  CHECK(max_abs(commutator(sz, sz)) == 0.0);
}

TEST_CASE("arithmetic stays Hermitian") {
  const auto a = HermitianOperator::identity(3);
  const auto b = 2.0 * a - a + a.squared();
  CHECK(max_abs(b.matrix() - 2.0 * CMatrix::Identity(3, 3)) < 1e-15);
  CHECK(hermiticity_residual(b.matrix()) == 0.0);
}

}
