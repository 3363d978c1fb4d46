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

#include "sovlab/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sovlab/parallel.hpp"

namespace sovlab::traj {

NoisePath sample_noise_path(std::uint64_t seed, double dt, std::size_t n) {
  if (!(dt > 0.0)) throw Error("sample_noise_path: dt must be positive");
  if (n == 0) throw Error("sample_noise_path: need at least one step");
  NoisePath path{seed, dt, {}};
  path.increments.resize(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  for (auto& dw : path.increments) dw = normal(rng);
  return path;
}

CMatrix step_propagator(const CMatrix& u, const LindbladSpec& spec, double dt,
                        double dw) {
  const CMatrix gen = dt * spec.h0.matrix() +
                      (std::sqrt(2.0 * spec.gamma) * dw) * spec.jump.matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (gen + gen.adjoint()));
  if (es.info() != Eigen::Success) {
    throw NumericalError("step_propagator: eigensolver failed");
  }
  const CVector phases = (-kI * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * u;
}

TrajectorySimulator::TrajectorySimulator(LindbladSpec spec)
    : spec_(std::move(spec)), basis_(superop::joint_eigenbasis(spec_.h0, spec_.jump)) {}

std::vector<CMatrix> TrajectorySimulator::evolve(
    const CMatrix& a, const NoisePath& path,
    std::span<const std::size_t> sample_steps) const {
  std::vector<CMatrix> out(sample_steps.size());
  if (sample_steps.empty()) return out;
  const std::size_t last = *std::max_element(sample_steps.begin(), sample_steps.end());
  if (last > path.steps()) throw Error("evolve: sample beyond end of noise path");
  const double coupling = std::sqrt(2.0 * spec_.gamma);
  const Eigen::Index d = a.rows();

  auto emit = [&](std::size_t step, auto&& make) {
    for (std::size_t s = 0; s < sample_steps.size(); ++s) {
      if (sample_steps[s] == step) out[s] = make();
    }
  };

  if (basis_) {
    // U_t = B diag(exp(-i theta)) B^dagger, theta_n = E_n t + coupling l_n W_t.
    const CMatrix& b = basis_->basis;
    const CMatrix a_eig = b.adjoint() * a * b;
    RVector theta = RVector::Zero(d);
    auto make = [&] {
      CMatrix m = a_eig;
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
          m(i, j) *= std::exp(kI * (theta(i) - theta(j)));
      return CMatrix(b * m * b.adjoint());
    };
    emit(0, make);
    for (std::size_t k = 0; k < last; ++k) {
      theta += path.dt * basis_->first + (coupling * path.increments[k]) * basis_->second;
      emit(k + 1, make);
    }
    return out;
  }

  CMatrix u = CMatrix::Identity(d, d);
  auto make = [&] { return CMatrix(u.adjoint() * a * u); };
  emit(0, make);
  for (std::size_t k = 0; k < last; ++k) {
    u = step_propagator(u, spec_, path.dt, path.increments[k]);
    emit(k + 1, make);
  }
  return out;
}

std::vector<std::size_t> grid_indices(std::span<const double> times, double dt,
                                      std::size_t max_steps) {
  std::vector<std::size_t> idx;
  idx.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0)) throw Error("sample time must be non-negative");
    const double k = std::round(t / dt);
    if (std::abs(k * dt - t) > 1e-9 * std::max(1.0, t)) {
      std::ostringstream os;
      os << "sample time " << t << " is not on the dt = " << dt << " grid";
      throw Error(os.str());
    }
    const auto ki = static_cast<std::size_t>(k);
    if (ki > max_steps) throw Error("sample time beyond end of noise path");
    idx.push_back(ki);
  }
  return idx;
}

std::vector<HermitianOperator> heisenberg_trajectory(
    const HermitianOperator& a, const LindbladSpec& spec, const NoisePath& path,
    std::span<const double> sample_times) {
  const auto steps = grid_indices(sample_times, path.dt, path.steps());
  TrajectorySimulator sim(spec);
  std::vector<HermitianOperator> out;
  for (auto& m : sim.evolve(a.matrix(), path, steps)) {
    out.push_back(HermitianOperator::symmetrized(m));
  }
  return out;
}

std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t k) {
  return derive_seed(base_seed, k);
}

namespace {

// Entrywise sums for one contiguous block of trajectories.
struct BlockSums {
  std::vector<CMatrix> first;     // sum A_t
  std::vector<CMatrix> second;    // sum A_t^2
  std::vector<CMatrix> first_sq;  // sum (re^2, im^2) of A_t entries
  std::vector<CMatrix> second_sq;
};

CMatrix squares(const CMatrix& m) {
  return (m.real().array().square().matrix().cast<cplx>() +
          kI * m.imag().array().square().matrix().cast<cplx>());
}

CMatrix stderr_from(const CMatrix& sum, const CMatrix& sum_sq, std::size_t n) {
  const double dn = static_cast<double>(n);
  CMatrix se(sum.rows(), sum.cols());
  for (Eigen::Index i = 0; i < sum.size(); ++i) {
    auto one = [&](double s, double s2) {
      if (n < 2) return 0.0;
      const double mean = s / dn;
      const double var = std::max(0.0, (s2 / dn - mean * mean) * dn / (dn - 1.0));
      return std::sqrt(var / dn);
    };
    se(i) = cplx(one(sum(i).real(), sum_sq(i).real()),
                 one(sum(i).imag(), sum_sq(i).imag()));
  }
  return se;
}

}  // namespace

MomentSeries ensemble_moments(const HermitianOperator& a,
                              const LindbladSpec& spec, const EnsembleSpec& ens,
                              std::span<const double> sample_times) {
  if (ens.trajectories == 0) throw Error("ensemble_moments: M must be >= 1");
  if (!(ens.dt > 0.0)) throw Error("ensemble_moments: dt must be positive");
  if (a.dim() != spec.dim()) throw DimensionError("ensemble_moments: dimension mismatch");
  const auto n_steps = static_cast<std::size_t>(std::llround(ens.t_max / ens.dt));
  const auto steps = grid_indices(sample_times, ens.dt, n_steps);
  const std::size_t path_len = std::max<std::size_t>(
      1, steps.empty() ? 1 : *std::max_element(steps.begin(), steps.end()));

  const TrajectorySimulator sim(spec);
  const std::size_t m_total = ens.trajectories;
  const std::size_t n_times = sample_times.size();
  const Eigen::Index d = a.dim();
  // Block layout depends only on M, never on the worker count.
  const std::size_t n_blocks = std::min<std::size_t>(m_total, 64);
  const std::size_t block = (m_total + n_blocks - 1) / n_blocks;
  const unsigned threads = resolve_threads(ens.threads);

  auto run = [&](std::size_t k) {
    const auto path = sample_noise_path(trajectory_seed(ens.base_seed, k), ens.dt, path_len);
    return sim.evolve(a.matrix(), path, steps);
  };
  auto zeros = [&] { return std::vector<CMatrix>(n_times, CMatrix::Zero(d, d)); };

  std::vector<BlockSums> blocks(n_blocks);
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    BlockSums s{zeros(), zeros(), zeros(), zeros()};
    const std::size_t lo = b * block, hi = std::min(m_total, lo + block);
    for (std::size_t k = lo; k < hi; ++k) {
      const auto ops = run(k);
      for (std::size_t t = 0; t < n_times; ++t) {
        const CMatrix sq = ops[t] * ops[t];
        s.first[t] += ops[t];
        s.second[t] += sq;
        s.first_sq[t] += squares(ops[t]);
        s.second_sq[t] += squares(sq);
      }
    }
    blocks[b] = std::move(s);
  });

  BlockSums total{zeros(), zeros(), zeros(), zeros()};
  for (const auto& s : blocks) {
    for (std::size_t t = 0; t < n_times; ++t) {
      total.first[t] += s.first[t];
      total.second[t] += s.second[t];
      total.first_sq[t] += s.first_sq[t];
      total.second_sq[t] += s.second_sq[t];
    }
  }

  MomentSeries ms;
  ms.times.assign(sample_times.begin(), sample_times.end());
  ms.trajectories = m_total;
  const double dm = static_cast<double>(m_total);
  std::vector<CMatrix> mean(n_times);
  for (std::size_t t = 0; t < n_times; ++t) {
    mean[t] = total.first[t] / dm;
    ms.mean_op.push_back(HermitianOperator::symmetrized(mean[t]));
    ms.second_op.push_back(HermitianOperator::symmetrized(total.second[t] / dm));
    ms.mean_stderr.push_back(stderr_from(total.first[t], total.first_sq[t], m_total));
    ms.second_stderr.push_back(stderr_from(total.second[t], total.second_sq[t], m_total));
  }
  if (!ens.sov_stderr) return ms;

  // Leave-one-out jackknife of second - mean^2. With e_k = (mean - A_k)/(M-1)
  // the deleted estimate differs from the full one by
  //   d_k = (second - A_k^2)/(M-1) - mean e_k - e_k mean - e_k^2.
  // The linear part alone (the delta method) misses the quadratic e_k^2 term,
  // which dominates entries where the noise average has cancelled.
  std::vector<std::pair<std::vector<CMatrix>, std::vector<CMatrix>>> jack(n_blocks);
  const double dm1 = dm - 1.0;
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    auto sum = zeros(), sum_sq = zeros();
    if (m_total < 2) {
      jack[b] = {std::move(sum), std::move(sum_sq)};
      return;
    }
    const std::size_t lo = b * block, hi = std::min(m_total, lo + block);
    for (std::size_t k = lo; k < hi; ++k) {
      const auto ops = run(k);
      for (std::size_t t = 0; t < n_times; ++t) {
        const CMatrix e = (mean[t] - ops[t]) / dm1;
        const CMatrix dk = (total.second[t] / dm - ops[t] * ops[t]) / dm1 -
                           mean[t] * e - e * mean[t] - e * e;
        sum[t] += dk;
        sum_sq[t] += squares(dk);
      }
    }
    jack[b] = {std::move(sum), std::move(sum_sq)};
  });
  auto sum = zeros(), sum_sq = zeros();
  for (const auto& [s, s2] : jack) {
    for (std::size_t t = 0; t < n_times; ++t) {
      sum[t] += s[t];
      sum_sq[t] += s2[t];
    }
  }
  for (std::size_t t = 0; t < n_times; ++t) {
    CMatrix se(d, d);
    for (Eigen::Index i = 0; i < se.size(); ++i) {
      auto one = [&](double s, double s2) {
        return std::sqrt(std::max(0.0, dm1 / dm * (s2 - s * s / dm)));
      };
      se(i) = cplx(one(sum[t](i).real(), sum_sq[t](i).real()),
                   one(sum[t](i).imag(), sum_sq[t](i).imag()));
    }
    ms.sov_stderr.push_back(std::move(se));
  }
  return ms;
}

std::vector<HermitianOperator> empirical_sov(const MomentSeries& ms) {
  std::vector<HermitianOperator> out;
  out.reserve(ms.times.size());
  for (std::size_t t = 0; t < ms.times.size(); ++t) {
    const CMatrix& m = ms.mean_op[t].matrix();
    out.push_back(HermitianOperator::symmetrized(ms.second_op[t].matrix() - m * m));
  }
  return out;
}

}  // namespace sovlab::traj
