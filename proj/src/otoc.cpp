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

#include "sovlab/otoc.hpp"

#include <cmath>
#include <limits>

namespace sovlab::otoc {

namespace {

double scale_for(Normalization norm, Eigen::Index n) {
  return norm == Normalization::per_dim ? 1.0 / static_cast<double>(n) : 1.0;
}

}  // namespace

OTOCSeries dissipative_otoc(const Propagator& prop, const HermitianOperator& a,
                            std::span<const double> times, Normalization norm) {
  const CMatrix& l = prop.spec().jump.matrix();
  const double s = scale_for(norm, a.dim());
  OTOCSeries out{{times.begin(), times.end()}, {}, norm};
  out.values.reserve(times.size());
  for (double t : times) {
    const CMatrix c = commutator(l, prop.apply(a.matrix(), t));
    // c is anti-Hermitian so Tr(c^2) = -||c||_F^2; this form is exactly real.
    out.values.push_back(s * c.squaredNorm());
  }
  return out;
}

OTOCSeries otoc_from_sov(std::span<const double> sov_trace, double t0, double dt,
                         double gamma, Eigen::Index n_dim, Normalization norm) {
  if (!(gamma > 0.0)) throw Error("otoc_from_sov: relation undefined for gamma = 0");
  if (!(dt > 0.0)) throw Error("otoc_from_sov: dt must be positive");
  const std::size_t n = sov_trace.size();
  if (n < 3) throw Error("otoc_from_sov: need at least three samples");
  const double pref = scale_for(norm, n_dim) / (2.0 * gamma);
  OTOCSeries out;
  out.normalization = norm;
  out.times.resize(n);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.times[i] = t0 + dt * static_cast<double>(i);
    double d;
    if (i == 0) {
      d = (-3.0 * sov_trace[0] + 4.0 * sov_trace[1] - sov_trace[2]) / (2.0 * dt);
    } else if (i + 1 == n) {
      d = (3.0 * sov_trace[n - 1] - 4.0 * sov_trace[n - 2] + sov_trace[n - 3]) / (2.0 * dt);
    } else {
      d = (sov_trace[i + 1] - sov_trace[i - 1]) / (2.0 * dt);
    }
    out.values[i] = pref * d;
  }
  return out;
}

double DissipationAnalysis::model(double t) const {
  if (!finite) return c0;
  return c0 * std::exp(-t / tau_d);
}

DissipationAnalysis dissipation_time(const HermitianOperator& a,
                                     const HermitianOperator& jump, double gamma) {
  if (a.dim() != jump.dim()) throw DimensionError("dissipation_time: dimension mismatch");
  const double n = static_cast<double>(a.dim());
  const CMatrix c1 = commutator(jump.matrix(), a.matrix());
  const CMatrix c2 = commutator(jump.matrix(), c1);
  DissipationAnalysis out;
  out.c0 = c1.squaredNorm() / n;  // -Tr(c1^2)/N with c1 anti-Hermitian
  if (!(out.c0 > 0.0)) throw Error("dissipation_time: [L, A] vanishes");
  const double hs = c2.squaredNorm();  // Tr(c2^2) with c2 Hermitian
  const double rate = 2.0 * gamma * hs / (out.c0 * n);
  if (!(rate > 0.0)) {
    out.finite = false;
    out.tau_d = std::numeric_limits<double>::infinity();
  } else {
    out.tau_d = 1.0 / rate;
  }
  return out;
}

OTOCSeries commuting_otoc_closed_form(const HermitianOperator& a,
                                      const HermitianOperator& h0,
                                      const HermitianOperator& jump, double gamma,
                                      std::span<const double> times,
                                      Normalization norm) {
  const auto joint = superop::joint_eigenbasis(h0, jump);
  if (!joint) {
    throw Error("commuting_otoc_closed_form: H0 and L do not commute");
  }
  const CMatrix ae = joint->basis.adjoint() * a.matrix() * joint->basis;
  const RVector& l = joint->second;
  const Eigen::Index d = a.dim();
  const double s = scale_for(norm, d);
  OTOCSeries out{{times.begin(), times.end()}, {}, norm};
  for (double t : times) {
    double sum = 0.0;
    for (Eigen::Index m = 0; m < d; ++m) {
      for (Eigen::Index n = 0; n < d; ++n) {
        const double dl2 = std::pow(l(m) - l(n), 2);
        sum += dl2 * std::exp(-2.0 * gamma * dl2 * t) * std::norm(ae(n, m));
      }
    }
    out.values.push_back(s * sum);
  }
  return out;
}

LyapunovFit lyapunov_from_otoc(const OTOCSeries& series, FitWindow window) {
  if (!(window.begin < window.end)) throw Error("lyapunov_from_otoc: empty window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < window.begin || t > window.end) continue;
    const double c = series.values[i];
    if (!(c > 0.0)) throw NumericalError("lyapunov_from_otoc: non-positive C_t in window");
    pts.emplace_back(t, std::log(c));
  }
  if (pts.size() < 2) throw Error("lyapunov_from_otoc: fewer than two samples in window");
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0;
  for (auto [x, y] : pts) ss += std::pow(y - icpt - slope * x, 2);
  return LyapunovFit{slope, std::exp(icpt), window, std::sqrt(ss / n), pts.size()};
}

}  // namespace sovlab::otoc
