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

#include "sovlab/superop.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sovlab::superop {

LindbladSpec::LindbladSpec(HermitianOperator h0_, HermitianOperator jump_,
                           double gamma_)
    : h0(std::move(h0_)), jump(std::move(jump_)), gamma(gamma_) {
  if (h0.dim() != jump.dim()) {
    throw DimensionError("LindbladSpec: H0 and L dimensions differ");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error("LindbladSpec: gamma must be finite and non-negative");
  }
}

CVector vectorize(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("vectorize: not square");
  const Eigen::Index d = a.rows();
  CVector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = a(i, j);
  return v;
}

CMatrix devectorize(const CVector& v) {
  const auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) {
    throw DimensionError("devectorize: length is not a perfect square");
  }
  CMatrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = v(i * d + j);
  return a;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

SuperoperatorMatrix::SuperoperatorMatrix(CMatrix m) : m_(std::move(m)) {
  const auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(m_.rows()))));
  if (m_.rows() != m_.cols() || d * d != m_.rows()) {
    throw DimensionError("SuperoperatorMatrix: expected a d^2 x d^2 matrix");
  }
  const CVector unit = vectorize(CMatrix::Identity(d, d));
  const double leak = (m_ * unit).cwiseAbs().maxCoeff();
  if (leak > 1e-10 * std::max(1.0, max_abs(m_))) {
    std::ostringstream os;
    os << "SuperoperatorMatrix: generator does not annihilate the identity ("
       << leak << ")";
    throw NumericalError(os.str());
  }
}

CMatrix SuperoperatorMatrix::apply(const CMatrix& a) const {
  return devectorize(m_ * vectorize(a));
}

SuperoperatorMatrix build_adjoint_lindbladian(const LindbladSpec& spec) {
  const Eigen::Index d = spec.dim();
  const CMatrix one = CMatrix::Identity(d, d);
  const CMatrix& h = spec.h0.matrix();
  const CMatrix& l = spec.jump.matrix();
  const CMatrix l2 = l * l;
  CMatrix m = kI * kron(h, one) - kI * kron(one, h.transpose());
  if (spec.gamma != 0.0) {
    m += spec.gamma * (2.0 * kron(l, l.transpose()) - kron(l2, one) -
                       kron(one, l2.transpose()));
  }
  return SuperoperatorMatrix(std::move(m));
}

CMatrix apply_adjoint_lindbladian(const LindbladSpec& spec, const CMatrix& a) {
  const CMatrix& h = spec.h0.matrix();
  const CMatrix& l = spec.jump.matrix();
  CMatrix out = kI * commutator(h, a);
  if (spec.gamma != 0.0) out -= spec.gamma * commutator(l, commutator(l, a));
  return out;
}

std::optional<JointEigenbasis> joint_eigenbasis(const HermitianOperator& a,
                                                const HermitianOperator& b) {
  const CMatrix& am = a.matrix();
  const CMatrix& bm = b.matrix();
  const double scale_a = std::max(1.0, max_abs(am));
  const double scale_b = std::max(1.0, max_abs(bm));
  if (max_abs(commutator(am, bm)) > 1e-10 * scale_a * scale_b) {
    return std::nullopt;
  }
  // An irrational mixing weight lifts degeneracies of either operator alone.
  const double weight = 0.6180339887498949 * scale_a / scale_b;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(am + weight * bm);
  if (es.info() != Eigen::Success) return std::nullopt;
  const CMatrix& u = es.eigenvectors();
  const CMatrix da = u.adjoint() * am * u;
  const CMatrix db = u.adjoint() * bm * u;
  auto off_diag = [](const CMatrix& m) {
    CMatrix o = m;
    o.diagonal().setZero();
    return max_abs(o);
  };
  if (off_diag(da) > 1e-9 * scale_a || off_diag(db) > 1e-9 * scale_b) {
    return std::nullopt;
  }
  return JointEigenbasis{u, da.diagonal().real(), db.diagonal().real()};
}

namespace {

double one_norm(const CMatrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

Propagator::Propagator(LindbladSpec spec, PropagationConfig cfg)
    : spec_(std::move(spec)), cfg_(cfg), method_(cfg.method) {
  if (!(cfg_.ode_dt > 0.0)) {
    throw Error("PropagationConfig: ode_dt must be positive");
  }
  if (method_ == PropagationMethod::ode) {
    condition_ = std::nan("");
    return;
  }
  if (auto joint = joint_eigenbasis(spec_.h0, spec_.jump)) {
    commuting_ = CommonBasis{std::move(joint->basis), std::move(joint->first),
                             std::move(joint->second)};
    return;
  }

  CMatrix gen = build_adjoint_lindbladian(spec_).matrix();
  const lapack_int n = static_cast<lapack_int>(gen.rows());
  CVector w(n);
  CMatrix vr(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'V', n,
      reinterpret_cast<lapack_complex_double*>(gen.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, n,
      reinterpret_cast<lapack_complex_double*>(vr.data()), n);
  if (info != 0) {
    method_ = PropagationMethod::ode;
    condition_ = std::numeric_limits<double>::infinity();
    return;
  }
  Eigen::PartialPivLU<CMatrix> lu(vr);
  CMatrix inv = lu.inverse();
  condition_ = one_norm(vr) * one_norm(inv);
  if (!std::isfinite(condition_) ||
      condition_ > cfg_.spectral_condition_limit) {
    method_ = PropagationMethod::ode;
    return;
  }
  spectral_ = Spectral{std::move(w), std::move(vr), std::move(inv)};
}

CMatrix Propagator::apply(const CMatrix& a, double t) const {
  if (a.rows() != spec_.dim() || a.cols() != spec_.dim()) {
    throw DimensionError("Propagator::apply: dimension mismatch");
  }
  if (!(t >= 0.0)) throw Error("Propagator::apply: t must be non-negative");
  if (t == 0.0) return a;

  if (commuting_) {
    const auto& cb = *commuting_;
    CMatrix at = cb.basis.adjoint() * a * cb.basis;
    const Eigen::Index d = at.rows();
    for (Eigen::Index m = 0; m < d; ++m) {
      for (Eigen::Index n = 0; n < d; ++n) {
        const double de = cb.energies(m) - cb.energies(n);
        const double dl = cb.jump_values(m) - cb.jump_values(n);
        at(m, n) *= std::exp(cplx(-spec_.gamma * dl * dl * t, de * t));
      }
    }
    return cb.basis * at * cb.basis.adjoint();
  }
  if (spectral_) {
    CVector c = spectral_->inverse * vectorize(a);
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      c(k) *= std::exp(spectral_->eigenvalues(k) * t);
    }
    return devectorize(spectral_->vectors * c);
  }
  return apply_ode(a, t);
}

CMatrix Propagator::apply_ode(const CMatrix& a, double t) const {
  const auto steps =
      std::max<long long>(1, static_cast<long long>(std::ceil(t / cfg_.ode_dt - 1e-9)));
  const double h = t / static_cast<double>(steps);
  CMatrix y = a;
  for (long long s = 0; s < steps; ++s) {
    const CMatrix k1 = apply_adjoint_lindbladian(spec_, y);
    const CMatrix k2 = apply_adjoint_lindbladian(spec_, y + 0.5 * h * k1);
    const CMatrix k3 = apply_adjoint_lindbladian(spec_, y + 0.5 * h * k2);
    const CMatrix k4 = apply_adjoint_lindbladian(spec_, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) {
      throw NumericalError("Propagator: ODE integration produced non-finite values");
    }
  }
  return y;
}

HermitianOperator Propagator::propagate(const HermitianOperator& a, double t,
                                        double* asymmetry) const {
  const CMatrix at = apply(a.matrix(), t);
  double res = 0.0;
  HermitianOperator out = HermitianOperator::symmetrized(at, &res);
  if (asymmetry != nullptr) *asymmetry = res;
  if (res > 1e-9 * std::max(1.0, max_abs(at))) {
    std::ostringstream os;
    os << "Propagator: propagated operator lost hermiticity (" << res << ")";
    throw NumericalError(os.str());
  }
  return out;
}

HermitianOperator propagate(const LindbladSpec& spec, const HermitianOperator& a,
                            double t, const PropagationConfig& cfg) {
  return Propagator(spec, cfg).propagate(a, t);
}

}  // namespace sovlab::superop
