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

#include "sovlab/sov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sovlab/superop.hpp"

namespace sovlab::sov {

namespace {

CMatrix raw_sov(const Propagator& prop, const CMatrix& a, const CMatrix& a2,
                double t) {
  const CMatrix at = prop.apply(a, t);
  return prop.apply(a2, t) - at * at;
}

void check_positive(const HermitianOperator& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().size() ? es.eigenvalues()(0) : 0.0;
  if (lo < -kClipTolerance) {
    std::ostringstream os;
    os << what << ": eigenvalue " << lo << " below -" << kClipTolerance;
    throw NumericalError(os.str());
  }
}

}  // namespace

HermitianOperator exact_sov(const Propagator& prop, const HermitianOperator& a,
                            double t) {
  if (!(t >= 0.0)) throw Error("exact_sov: t must be non-negative");
  const CMatrix& am = a.matrix();
  auto out = HermitianOperator::symmetrized(raw_sov(prop, am, am * am, t));
  check_positive(out, "exact_sov");
  return out;
}

HermitianOperator exact_sov(const LindbladSpec& spec, const HermitianOperator& a,
                            double t) {
  return exact_sov(Propagator(spec), a, t);
}

double sov_rhs_residual(const Propagator& prop, const HermitianOperator& a,
                        double t, double dt_fd, SourceSign sign) {
  if (!(dt_fd > 0.0) || !(t > dt_fd)) {
    throw Error("sov_rhs_residual: need t > dt_fd > 0");
  }
  const auto& spec = prop.spec();
  const CMatrix& am = a.matrix();
  const CMatrix a2 = am * am;
  const CMatrix deriv =
      (raw_sov(prop, am, a2, t + dt_fd) - raw_sov(prop, am, a2, t - dt_fd)) /
      (2.0 * dt_fd);
  const CMatrix at = prop.apply(am, t);
  const CMatrix c = commutator(spec.jump.matrix(), at);
  const double s = sign == SourceSign::correct ? 1.0 : -1.0;
  const CMatrix rhs =
      superop::apply_adjoint_lindbladian(spec, raw_sov(prop, am, a2, t)) -
      s * 2.0 * spec.gamma * (c * c);
  return max_abs(deriv - rhs);
}

SOVSeries sov_eigensystem(std::span<const double> times,
                          std::vector<HermitianOperator> sovs) {
  if (times.size() != sovs.size()) {
    throw DimensionError("sov_eigensystem: times and operators differ in length");
  }
  SOVSeries out;
  out.times.assign(times.begin(), times.end());
  if (sovs.empty()) return out;
  const Eigen::Index d = sovs.front().dim();
  out.eigvals.resize(static_cast<Eigen::Index>(sovs.size()), d);
  for (std::size_t ti = 0; ti < sovs.size(); ++ti) {
    if (sovs[ti].dim() != d) throw DimensionError("sov_eigensystem: mixed dimensions");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sovs[ti].matrix());
    if (es.info() != Eigen::Success) {
      throw NumericalError("sov_eigensystem: eigensolver failed");
    }
    CMatrix vecs = es.eigenvectors();
    for (Eigen::Index k = 0; k < d; ++k) {
      Eigen::Index big = 0;
      vecs.col(k).cwiseAbs().maxCoeff(&big);
      const cplx p = vecs(big, k);
      vecs.col(k) *= std::conj(p) / std::abs(p);
      if (ti > 0 && out.eigvecs.back().col(k).dot(vecs.col(k)).real() < 0.0) {
        vecs.col(k) = -vecs.col(k);
      }
      if (k + 1 < d && es.eigenvalues()(k + 1) - es.eigenvalues()(k) < 1e-10) {
        out.near_crossings.emplace_back(ti, static_cast<std::size_t>(k));
      }
    }
    out.eigvals.row(static_cast<Eigen::Index>(ti)) = es.eigenvalues().transpose();
    out.eigvecs.push_back(std::move(vecs));
  }
  out.sov = std::move(sovs);
  return out;
}

SOVSeries exact_sov_series(const Propagator& prop, const HermitianOperator& a,
                           std::span<const double> times) {
  std::vector<HermitianOperator> sovs;
  sovs.reserve(times.size());
  for (double t : times) sovs.push_back(exact_sov(prop, a, t));
  return sov_eigensystem(times, std::move(sovs));
}

FitWindow early_window(double gamma) { return {0.01 / gamma, 0.1 / gamma}; }
FitWindow mid_window(double gamma) { return {0.1 / gamma, 1.0 / gamma}; }

TransportFit transport_exponent_fit(const SOVSeries& series, std::size_t k,
                                    FitWindow window) {
  if (!(window.begin > 0.0) || !(window.begin < window.end)) {
    throw Error("transport_exponent_fit: need 0 < t_a < t_b");
  }
  if (static_cast<Eigen::Index>(k) >= series.eigvals.cols()) {
    throw Error("transport_exponent_fit: mode index out of range");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < window.begin || t > window.end) continue;
    const double lam = series.eigvals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    if (!(lam > 0.0)) {
      throw NumericalError("transport_exponent_fit: non-positive eigenvalue in window");
    }
    xs.push_back(std::log(t));
    ys.push_back(std::log(lam));
  }
  if (xs.size() < 10) {
    throw Error("transport_exponent_fit: fewer than 10 samples in window");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (icpt + slope * xs[i]);
    ss += r * r;
  }
  return TransportFit{k, window, slope, icpt, std::sqrt(ss / n), xs.size()};
}

MinSovState min_sov_state(const Propagator& prop, const HermitianOperator& a,
                          double t_max, double conv_tol) {
  if (!(t_max > 0.0)) throw Error("min_sov_state: t_max must be positive");
  const auto late = exact_sov(prop, a, t_max);
  const auto half = exact_sov(prop, a, 0.5 * t_max);
  Eigen::SelfAdjointEigenSolver<CMatrix> es_late(late.matrix());
  Eigen::SelfAdjointEigenSolver<CMatrix> es_half(half.matrix());
  MinSovState out;
  out.t_max = t_max;
  out.state = es_late.eigenvectors().col(0);
  out.lambda0 = std::max(0.0, es_late.eigenvalues()(0));
  if (max_abs(late.matrix()) <= 1e-12) {
    out.degenerate = true;
    out.converged = true;
    out.overlap = 1.0;
    return out;
  }
  out.overlap = std::abs(es_half.eigenvectors().col(0).dot(out.state));
  out.converged = out.overlap > 1.0 - conv_tol;
  return out;
}

CMatrix covariance(const Propagator& prop, const HermitianOperator& a,
                   const HermitianOperator& b, double t) {
  if (a.dim() != b.dim()) throw DimensionError("covariance: dimension mismatch");
  const CMatrix& am = a.matrix();
  const CMatrix& bm = b.matrix();
  return prop.apply(am * bm, t) - prop.apply(am, t) * prop.apply(bm, t);
}

UncertaintyReport uncertainty_check(const Propagator& prop,
                                    const HermitianOperator& a,
                                    const HermitianOperator& b,
                                    const CMatrix& rho0, double t) {
  if (rho0.rows() != a.dim() || rho0.cols() != a.dim() || b.dim() != a.dim()) {
    throw DimensionError("uncertainty_check: dimension mismatch");
  }
  if (hermiticity_residual(rho0) > 1e-10) {
    throw Error("uncertainty_check: rho0 is not Hermitian");
  }
  if (std::abs(rho0.trace() - 1.0) > 1e-10) {
    throw Error("uncertainty_check: rho0 does not have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho0 + rho0.adjoint()),
                                            Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-12) {
    throw Error("uncertainty_check: rho0 is not positive semidefinite");
  }

  const CMatrix& am = a.matrix();
  const CMatrix& bm = b.matrix();
  const CMatrix at = prop.apply(am, t);
  const CMatrix bt = prop.apply(bm, t);
  const CMatrix ab = am * bm;
  const CMatrix ba = bm * am;
  auto ev = [&](const CMatrix& m) { return (m * rho0).trace(); };

  const cplx var_a = ev(prop.apply(am * am, t) - at * at);
  const cplx var_b = ev(prop.apply(bm * bm, t) - bt * bt);
  const cplx cov = ev(prop.apply(ab, t) - at * bt);

  UncertaintyReport r;
  r.d_plus = ev(prop.apply(ab + ba, t)) - ev(at * bt + bt * at);
  r.d_minus = ev(prop.apply(ab - ba, t)) - ev(at * bt - bt * at);
  r.lhs = var_a.real() * var_b.real();
  r.mid = std::norm(cov);
  r.rhs = 0.25 * (r.d_plus * r.d_plus - r.d_minus * r.d_minus).real();
  return r;
}

VarianceGap quantum_variance_gap(const Propagator& prop,
                                 const HermitianOperator& a,
                                 const CVector& psi0, double t) {
  if (psi0.size() != a.dim()) throw DimensionError("quantum_variance_gap: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw Error("quantum_variance_gap: state is not normalized");
  }
  const CMatrix& am = a.matrix();
  const CMatrix at = prop.apply(am, t);
  const CMatrix a2t = prop.apply(am * am, t);
  auto ev = [&](const CMatrix& m) { return psi0.dot(m * psi0).real(); };

  const double quantum_var = ev(a2t) - std::pow(ev(at), 2);
  const double sov_expect = ev(a2t - at * at);
  const CMatrix q =
      CMatrix::Identity(a.dim(), a.dim()) - psi0 * psi0.adjoint();
  return VarianceGap{quantum_var - sov_expect, ev(at * q * at)};
}

double swap_product_check(const CMatrix& x, const CMatrix& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows()) {
    throw DimensionError("swap_product_check: need square matrices of equal size");
  }
  const Eigen::Index d = x.rows();
  CMatrix swap = CMatrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) swap(j * d + i, i * d + j) = 1.0;
  const CMatrix p = superop::kron(x, y) * swap;
  CMatrix reduced = CMatrix::Zero(d, d);
  for (Eigen::Index n1 = 0; n1 < d; ++n1)
    for (Eigen::Index m1 = 0; m1 < d; ++m1)
      for (Eigen::Index n2 = 0; n2 < d; ++n2)
        reduced(n1, m1) += p(n1 * d + n2, m1 * d + n2);
  return max_abs(reduced - x * y);
}

HermitianOperator psd_sqrt(const HermitianOperator& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigensolver failed");
  RVector ev = es.eigenvalues();
  if (ev.size() && ev(0) < -kClipTolerance) {
    throw NumericalError("psd_sqrt: operator has a negative eigenvalue");
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  const CMatrix& v = es.eigenvectors();
  return HermitianOperator::symmetrized(v * ev.cast<cplx>().asDiagonal() * v.adjoint());
}

SovProjection sov_projection(const HermitianOperator& sov,
                             const spin::SpinSpec& spec) {
  const auto ops = spin::spin_operators(spec);
  const auto one = HermitianOperator::identity(spec.dim());
  auto project = [&](const HermitianOperator& m) {
    return SpinCoefficients{spin::hs_inner(m, one, spec), spin::hs_inner(m, ops.x, spec),
                            spin::hs_inner(m, ops.y, spec), spin::hs_inner(m, ops.z, spec)};
  };
  return SovProjection{project(sov), project(psd_sqrt(sov))};
}

}  // namespace sovlab::sov
