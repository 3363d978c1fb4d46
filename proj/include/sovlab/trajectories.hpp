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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sovlab/superop.hpp"

namespace sovlab::traj {

using superop::LindbladSpec;

/// Wiener increments dW_k ~ Normal(0, dt), k = 0..n-1. Increment k belongs
/// to the interval [k dt, (k+1) dt] and is drawn at its start (Ito).
struct NoisePath {
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::vector<double> increments;

  std::size_t steps() const { return increments.size(); }
};

// Draws from std::mt19937_64 seeded with `seed` through
// std::normal_distribution; reproducible for a given standard library.
NoisePath sample_noise_path(std::uint64_t seed, double dt, std::size_t n);

/// exp(-i (H0 dt + sqrt(2 gamma) dW L)) * u. The generator is Hermitian, so
/// the factor is unitary to working precision.
CMatrix step_propagator(const CMatrix& u, const LindbladSpec& spec, double dt,
                        double dw);

/// Single-realization Heisenberg evolution A_t = U_t^dagger A U_t, with U_t
/// the chronological product of step propagators. When [H0, L] = 0 the
/// common eigenbasis is computed once and steps reduce to phase updates.
class TrajectorySimulator {
 public:
  explicit TrajectorySimulator(LindbladSpec spec);

  const LindbladSpec& spec() const { return spec_; }
  bool uses_common_eigenbasis() const { return basis_.has_value(); }

  // Operators at each sample time. Sample times must lie on the path grid
  // (within 1e-9 relative) and not beyond its end.
  std::vector<CMatrix> evolve(const CMatrix& a, const NoisePath& path,
                              std::span<const std::size_t> sample_steps) const;

 private:
  LindbladSpec spec_;
  std::optional<superop::JointEigenbasis> basis_;
};

// Maps sample times onto grid indices; throws Error for off-grid times.
std::vector<std::size_t> grid_indices(std::span<const double> times, double dt,
                                      std::size_t max_steps);

std::vector<HermitianOperator> heisenberg_trajectory(
    const HermitianOperator& a, const LindbladSpec& spec, const NoisePath& path,
    std::span<const double> sample_times);

struct EnsembleSpec {
  std::size_t trajectories = 2000;
  std::uint64_t base_seed = 0;
  double dt = 1e-3;
  double t_max = 1.0;
  unsigned threads = 0;
  // Second pass over the same seeds for jackknife errors of the SOV.
  bool sov_stderr = true;
};

// Trajectory k draws its path from derive_seed(base_seed, k).
std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t k);

/// Noise averages of A_t and A_t^2 at each sample time, with entrywise
/// standard errors. Error matrices store the standard error of the real part
/// in the real component and that of the imaginary part in the imaginary
/// component. Sums are reduced in trajectory-index order, so results do not
/// depend on the worker count.
struct MomentSeries {
  std::vector<double> times;
  std::vector<HermitianOperator> mean_op;
  std::vector<HermitianOperator> second_op;
  std::vector<CMatrix> mean_stderr;
  std::vector<CMatrix> second_stderr;
  // Jackknife errors of second - mean^2; empty when not requested.
  std::vector<CMatrix> sov_stderr;
  std::size_t trajectories = 0;
};

MomentSeries ensemble_moments(const HermitianOperator& a,
                              const LindbladSpec& spec, const EnsembleSpec& ens,
                              std::span<const double> sample_times);

// second_op - mean_op^2 per sample time, symmetrized.
std::vector<HermitianOperator> empirical_sov(const MomentSeries& ms);

}  // namespace sovlab::traj
