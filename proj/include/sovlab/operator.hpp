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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sovlab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Error hierarchy. The CLI maps each family onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

// Largest absolute entry of a complex matrix.
double max_abs(const CMatrix& m);

// Commutator [a, b] = ab - ba.
CMatrix commutator(const CMatrix& a, const CMatrix& b);

/// Dense Hermitian matrix. Construction rejects inputs whose anti-Hermitian
/// part exceeds the tolerance, measured as
///   max|M - M^dagger| <= herm_tol * max(1, max|M|).
/// The scale factor keeps large-spin operators (entries ~S^2) from failing on
/// roundoff alone.
class HermitianOperator {
 public:
  static constexpr double kDefaultTol = 1e-12;

  HermitianOperator() = default;
  explicit HermitianOperator(CMatrix m, double herm_tol = kDefaultTol);

  // Replaces m by (m + m^dagger)/2 and reports the discarded asymmetry.
  static HermitianOperator symmetrized(const CMatrix& m,
                                       double* residual = nullptr);
  static HermitianOperator identity(Eigen::Index dim);
  static HermitianOperator zero(Eigen::Index dim);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double herm_tol() const { return tol_; }

  // Hermitian square (A^2 stays Hermitian).
  HermitianOperator squared() const;

  friend HermitianOperator operator+(const HermitianOperator& a,
                                     const HermitianOperator& b);
  friend HermitianOperator operator-(const HermitianOperator& a,
                                     const HermitianOperator& b);
  friend HermitianOperator operator*(double s, const HermitianOperator& a);

 private:
  struct Trusted {};
  HermitianOperator(CMatrix m, double tol, Trusted) : m_(std::move(m)), tol_(tol) {}

  CMatrix m_;
  double tol_ = kDefaultTol;
};

// Asymmetry max|M - M^dagger|.
double hermiticity_residual(const CMatrix& m);

}  // namespace sovlab
