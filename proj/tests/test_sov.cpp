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
#include "sovlab/spin_algebra.hpp"
#include "sovlab/sov.hpp"

using namespace sovlab;
using namespace sovlab::sov;
using superop::LindbladSpec;
using superop::Propagator;

namespace {

struct Draw {
  CMatrix h, l, a;
  double g;
  LindbladSpec spec() const { return {HermitianOperator(h), HermitianOperator(l), g}; }
};

Draw draw(std::mt19937_64& rng, Eigen::Index d) {
  Draw x{oracle::random_hermitian(rng, d), oracle::random_hermitian(rng, d),
         oracle::random_hermitian(rng, d), std::uniform_real_distribution<double>(0.1, 1.0)(rng)};
  return x;
}

}  // namespace

TEST_SUITE("sov") {

TEST_CASE("exact SOV against RK4 moments") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 5; ++k) {
    const auto x = draw(rng, 3);
    const Propagator prop(x.spec());
    const double t = 0.8;
    const CMatrix m1 = oracle::rk4(x.h, x.l, x.g, x.a, t, 8000);
    const CMatrix m2 = oracle::rk4(x.h, x.l, x.g, x.a * x.a, t, 8000);
    CHECK(oracle::max_abs(exact_sov(prop, HermitianOperator(x.a), t).matrix() - (m2 - m1 * m1)) < 1e-9);
  }
}

TEST_CASE("SOV vanishes at t = 0 and without noise") {
  std::mt19937_64 rng(22);
  auto x = draw(rng, 4);
  const HermitianOperator a(x.a);
  CHECK(oracle::max_abs(exact_sov(x.spec(), a, 0.0).matrix()) < 1e-12);
  x.g = 0.0;
  const Propagator prop(x.spec());
  CHECK(oracle::max_abs(exact_sov(prop, a, 2.0).matrix()) < 1e-10);
  const auto ms = min_sov_state(prop, a, 2.0);
  CHECK(ms.degenerate);
}

TEST_CASE("SOV is positive semidefinite") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    const auto x = draw(rng, 4);
    const auto m = exact_sov(x.spec(), HermitianOperator(x.a), 0.05 + 0.3 * k);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m.matrix(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-9);
  }
}

TEST_CASE("equation-of-motion residual, its convergence and the mutation check") {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 5; ++k) {
    const auto x = draw(rng, 3);
    const Propagator prop(x.spec());
    const HermitianOperator a(x.a);
    const double r1 = sov_rhs_residual(prop, a, 0.4, 2e-3);
    const double r2 = sov_rhs_residual(prop, a, 0.4, 1e-3);
    CHECK(r2 < 1e-4);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
    CHECK(sov_rhs_residual(prop, a, 0.4, 1e-4) < 1e-6);
    CHECK(sov_rhs_residual(prop, a, 0.4, 1e-4, SourceSign::flipped) > 1e-3);
  }
}

TEST_CASE("eigensystem ordering and vector phase convention") {
  const auto s = spin::SpinSpec::from_spin(2.0);
  const auto h = spin::lmg_hamiltonian(s, 1.0);
  const auto a = spin::spin_combination(s, 1.0, 1.0, 1.0);
  const Propagator prop(LindbladSpec(h, h, 2.0));
  std::vector<double> times;
  for (int i = 1; i <= 30; ++i) times.push_back(0.01 * i);
  const auto series = exact_sov_series(prop, a, times);
  CHECK(series.eigvals.rows() == 30);
  for (Eigen::Index i = 0; i < series.eigvals.rows(); ++i) {
    for (Eigen::Index k = 1; k < series.eigvals.cols(); ++k) {
      CHECK(series.eigvals(i, k) >= series.eigvals(i, k - 1));
    }
  }
  for (std::size_t i = 1; i < series.eigvecs.size(); ++i) {
    for (Eigen::Index k = 0; k < series.eigvecs[i].cols(); ++k) {
      const bool crossing = std::any_of(series.near_crossings.begin(), series.near_crossings.end(),
                                        [&](auto p) { return p.first == i; });
      if (crossing) continue;
      CHECK(series.eigvecs[i].col(k).dot(series.eigvecs[i - 1].col(k)).real() >= 0.0);
    }
  }
}

TEST_CASE("transport fit recovers power laws") {
  std::vector<double> times;
  std::vector<HermitianOperator> m;
  for (int i = 0; i < 40; ++i) {
    const double t = 0.01 * std::pow(10.0, i / 39.0);
    times.push_back(t);
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 3.0 * std::pow(t, 1.5);
    d(1, 1) = 7.0 * t;
    m.emplace_back(d);
  }
  const auto series = sov_eigensystem(times, m);
  const FitWindow w{0.01, 0.1};
  const auto f0 = transport_exponent_fit(series, 0, w);
  const auto f1 = transport_exponent_fit(series, 1, w);
  CHECK(f0.exponent == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(std::exp(f0.intercept) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(f1.exponent == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS(transport_exponent_fit(series, 0, FitWindow{0.2, 0.3}));
}

TEST_CASE("fit windows scale with 1/gamma") {
  CHECK(early_window(2.0).begin == doctest::Approx(0.005));
  CHECK(early_window(2.0).end == doctest::Approx(0.05));
  CHECK(mid_window(2.0).end == doctest::Approx(0.5));
}

TEST_CASE("min-SOV state converges and minimizes the SOV expectation") {
  const auto s = spin::SpinSpec::from_spin(2.0);
  const auto h = spin::lmg_hamiltonian(s, 1.0);
  const auto a = spin::spin_combination(s, 1.0, 1.0, 1.0);
  const Propagator prop(LindbladSpec(h, h, 2.0));
  const auto ms = min_sov_state(prop, a, 20.0);
  CHECK(ms.converged);
  CHECK(std::abs(ms.state.norm() - 1.0) < 1e-12);
  const auto m = exact_sov(prop, a, 20.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.matrix());
  CHECK(ms.lambda0 == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    CVector v = oracle::random_hermitian(rng, 5).col(0);
    v.normalize();
    CHECK(v.dot(m.matrix() * v).real() >= ms.lambda0 - 1e-12);
  }
}

TEST_CASE("uncertainty relation and its saturation") {
  std::mt19937_64 rng(25);
  for (int k = 0; k < 20; ++k) {
    const auto x = draw(rng, 3);
    const CMatrix b = oracle::random_hermitian(rng, 3), r = oracle::random_hermitian(rng, 3);
    CMatrix rho = r * r;
    rho /= rho.trace();
    const Propagator prop(x.spec());
    const auto u = uncertainty_check(prop, HermitianOperator(x.a), HermitianOperator(b), rho, 0.6);
    CHECK(u.lhs >= u.mid - 1e-9);
    CHECK(u.mid >= u.rhs - 1e-9);
    CHECK(std::abs(u.d_plus.imag()) < 1e-10);
    CHECK(std::abs(u.d_minus.real()) < 1e-10);
    const auto same = uncertainty_check(prop, HermitianOperator(x.a), HermitianOperator(x.a), rho, 0.6);
    CHECK(std::abs(same.lhs - same.mid) < 1e-10);
  }
  const auto x = draw(rng, 2);
  CMatrix bad = CMatrix::Identity(2, 2);
  CHECK_THROWS(uncertainty_check(Propagator(x.spec()), HermitianOperator(x.a), HermitianOperator(x.a), bad, 0.1));
}

TEST_CASE("swap identity") {
  std::mt19937_64 rng(26);
  for (Eigen::Index d = 1; d <= 8; ++d) {
    const CMatrix x = oracle::random_hermitian(rng, d) + kI * oracle::random_hermitian(rng, d);
    const CMatrix y = oracle::random_hermitian(rng, d);
    CHECK(swap_product_check(x, y) <= 1e-12);
  }
}

TEST_CASE("quantum variance exceeds the SOV expectation by a projector term") {
  std::mt19937_64 rng(27);
  for (int k = 0; k < 10; ++k) {
    const auto x = draw(rng, 4);
    CVector psi = oracle::random_hermitian(rng, 4).col(1);
    psi.normalize();
    const auto g = quantum_variance_gap(Propagator(x.spec()), HermitianOperator(x.a), psi, 0.9);
    CHECK(g.projector >= -1e-12);
    CHECK(std::abs(g.direct - g.projector) < 1e-10);
  }
}

TEST_CASE("square root with clipping") {
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 4.0;
  d(1, 1) = -5e-10;
  d(2, 2) = 9.0;
  const auto r = psd_sqrt(HermitianOperator(d));
  CHECK(std::abs(r.matrix()(0, 0) - 2.0) < 1e-14);
  CHECK(std::abs(r.matrix()(1, 1)) < 1e-14);
  d(1, 1) = -1e-6;
  CHECK_THROWS_AS(psd_sqrt(HermitianOperator(d)), NumericalError);
}

TEST_CASE("projection onto spin components") {
  const auto s = spin::SpinSpec::from_spin(1.5);
  const auto o = spin::spin_operators(s);
  // Shifted so M is positive and sqrt(M^2) = M.
  const auto m = 2.0 * o.x + 0.5 * o.z + 4.0 * HermitianOperator::identity(4);
  const auto p = sov_projection(m.squared(), s);
  CHECK(std::abs(spin::hs_inner(m, o.x, s) - 2.0) < 1e-12);
  CHECK(std::abs(p.variance.y) < 1e-12);
  CHECK(std::abs(p.deviation.x - 2.0) < 1e-10);
  CHECK(std::abs(p.deviation.z - 0.5) < 1e-10);
}

}
