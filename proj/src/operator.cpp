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

#include "sovlab/operator.hpp"

#include <algorithm>
#include <sstream>

namespace sovlab {

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  return a * b - b * a;
}

double hermiticity_residual(const CMatrix& m) {
  return max_abs(m - m.adjoint());
}

HermitianOperator::HermitianOperator(CMatrix m, double herm_tol)
    : m_(std::move(m)), tol_(herm_tol) {
  if (m_.rows() != m_.cols()) {
    throw DimensionError("HermitianOperator: matrix is not square");
  }
  const double res = hermiticity_residual(m_);
  const double scale = std::max(1.0, max_abs(m_));
  if (!(res <= tol_ * scale)) {
    std::ostringstream os;
    os << "HermitianOperator: asymmetry " << res << " exceeds tolerance "
       << tol_ * scale;
    throw NumericalError(os.str());
  }
}

HermitianOperator HermitianOperator::symmetrized(const CMatrix& m,
                                                 double* residual) {
  if (m.rows() != m.cols()) {
    throw DimensionError("symmetrized: matrix is not square");
  }
  if (residual != nullptr) *residual = hermiticity_residual(m);
  CMatrix h = 0.5 * (m + m.adjoint());
  return HermitianOperator(std::move(h), kDefaultTol, Trusted{});
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
  return HermitianOperator(CMatrix::Identity(dim, dim), kDefaultTol, Trusted{});
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
  return HermitianOperator(CMatrix::Zero(dim, dim), kDefaultTol, Trusted{});
}

HermitianOperator HermitianOperator::squared() const {
  return symmetrized(m_ * m_);
}

HermitianOperator operator+(const HermitianOperator& a,
                            const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("operator+: dimension mismatch");
  return HermitianOperator(a.m_ + b.m_, a.tol_, HermitianOperator::Trusted{});
}

HermitianOperator operator-(const HermitianOperator& a,
                            const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("operator-: dimension mismatch");
  return HermitianOperator(a.m_ - b.m_, a.tol_, HermitianOperator::Trusted{});
}

HermitianOperator operator*(double s, const HermitianOperator& a) {
  return HermitianOperator(s * a.m_, a.tol_, HermitianOperator::Trusted{});
}

}  // namespace sovlab
