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

#include "oracles.hpp"
#include "sovlab/otoc.hpp"
#include "sovlab/spin_algebra.hpp"

using namespace sovlab;
using namespace sovlab::otoc;
using superop::LindbladSpec;
using superop::Propagator;

TEST_SUITE("otoc") {

TEST_CASE("direct OTOC matches the commutator norm of the RK4 operator") {
  std::mt19937_64 rng(31);
  const CMatrix h = oracle::random_hermitian(rng, 3), l = oracle::random_hermitian(rng, 3),
                a = oracle::random_hermitian(rng, 3);
  const Propagator prop(LindbladSpec(HermitianOperator(h), HermitianOperator(l), 0.4));
  const std::vector<double> times{0.0, 0.5};
  const auto c = dissipative_otoc(prop, HermitianOperator(a), times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const CMatrix at = oracle::rk4(h, l, 0.4, a, times[i], 4000);
    const CMatrix comm = l * at - at * l;
    const cplx ref = -(comm * comm).trace() / 3.0;
    CHECK(std::abs(ref.imag()) < 1e-10);
    CHECK(c.values[i] == doctest::Approx(ref.real()).epsilon(1e-9));
  }
  const auto raw = dissipative_otoc(prop, HermitianOperator(a), times, Normalization::unnormalized);
  CHECK(raw.values[1] == doctest::Approx(3.0 * c.values[1]));
}

TEST_CASE("SOV trace derivative reproduces the OTOC") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 3; ++k) {
    const CMatrix h = oracle::random_hermitian(rng, 4), l = oracle::random_hermitian(rng, 4),
                  a = oracle::random_hermitian(rng, 4);
    const Propagator prop(LindbladSpec(HermitianOperator(h), HermitianOperator(l), 0.3));
    const double dt = 1e-4;
    std::vector<double> times, tr;
    for (int i = 0; i < 15; ++i) {
      times.push_back(0.2 + i * dt);
      tr.push_back(sov::exact_sov(prop, HermitianOperator(a), times.back()).matrix().trace().real());
    }
    const auto fd = otoc_from_sov(tr, 0.2, dt, 0.3, 4);
    const auto direct = dissipative_otoc(prop, HermitianOperator(a), times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(std::abs(fd.values[i] - direct.values[i]) <= 1e-6 * direct.values[i]);
    }
  }
}

TEST_CASE("finite-difference stencils are exact on quadratics") {
  std::vector<double> q;
  for (int i = 0; i < 6; ++i) q.push_back(3.0 + 2.0 * (0.1 * i) + 5.0 * (0.1 * i) * (0.1 * i));
  const auto c = otoc_from_sov(q, 0.0, 0.1, 0.5, 2, Normalization::unnormalized);
  for (int i = 0; i < 6; ++i) CHECK(c.values[i] == doctest::Approx(2.0 + 10.0 * 0.1 * i));
  CHECK_THROWS(otoc_from_sov(q, 0.0, 0.1, 0.0, 2));
  CHECK_THROWS(otoc_from_sov(std::span<const double>(q.data(), 2), 0.0, 0.1, 0.5, 2));
}

TEST_CASE("two-level benchmark") {
  CMatrix sz(2, 2), sx(2, 2);
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  const std::vector<double> times{0.0, 0.1, 0.7, 2.0};
  for (double g : {0.1, 0.5, 1.3}) {
    const auto c = commuting_otoc_closed_form(HermitianOperator(sx), HermitianOperator(CMatrix(0.2 * sz)),
                                              HermitianOperator(sz), g, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(std::abs(c.values[i] - 4.0 * std::exp(-8.0 * g * times[i])) < 1e-10);
    }
  }
}

TEST_CASE("closed form matches general propagation for commuting H0 and L") {
  const auto s = spin::SpinSpec::from_spin(2.5);
  const auto h = spin::lmg_hamiltonian(s, 0.7);
  const auto a = spin::spin_combination(s, 1.0, -0.5, 0.25);
  const std::vector<double> times{0.0, 0.05, 0.3, 1.0};
  const auto cf = commuting_otoc_closed_form(a, h, h, 1.1, times);
  const Propagator ode(LindbladSpec(h, h, 1.1), {superop::PropagationMethod::ode, 1e-4, 1e10});
  const auto direct = dissipative_otoc(ode, a, times);
  for (std::size_t i = 0; i < times.size(); ++i) CHECK(std::abs(cf.values[i] - direct.values[i]) < 1e-9);
  const auto sx = spin::spin_operators(s).x;
  CHECK_THROWS(commuting_otoc_closed_form(a, h, sx, 1.0, times));
}

TEST_CASE("dissipation time against a hand computation") {
  CMatrix sz(2, 2), sx(2, 2);
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  // [sz, sx] = 2i sy, [sz, [sz, sx]] = 4 sx.  C0 = 4, 1/tau = 2 g * 16 * 2 / (4 * 2) = 8 g.
  const auto d = dissipation_time(HermitianOperator(sx), HermitianOperator(sz), 0.25);
  CHECK(d.c0 == doctest::Approx(4.0));
  CHECK(d.finite);
  CHECK(d.tau_d == doctest::Approx(0.5));
  CHECK(d.model(0.5) == doctest::Approx(4.0 * std::exp(-1.0)));
  CHECK_THROWS(dissipation_time(HermitianOperator(sz), HermitianOperator(sz), 0.25));
  const auto zero = dissipation_time(HermitianOperator(sx), HermitianOperator(sz), 0.0);
  CHECK_FALSE(zero.finite);
  CHECK(zero.model(10.0) == doctest::Approx(4.0));
}

TEST_CASE("Lyapunov fit recovers an injected exponential") {
  OTOCSeries s;
  for (int i = 0; i <= 20; ++i) {
    s.times.push_back(0.1 * i);
    s.values.push_back(1e-3 * std::exp(0.8 * 0.1 * i));
  }
  const auto f = lyapunov_from_otoc(s, {0.5, 1.5});
  CHECK(f.lambda_q == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(f.epsilon == doctest::Approx(1e-3).epsilon(1e-10));
}

}
