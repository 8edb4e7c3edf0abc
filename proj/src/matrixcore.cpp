// Copyright 2026 The dqtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dqt/matrixcore.hpp"

#include <cmath>
#include <stdexcept>

namespace dqt {

Complex hs_inner(const CMatrix& m, const CMatrix& l) {
  if (m.rows() != l.rows() || m.cols() != l.cols()) {
    throw std::invalid_argument("hs_inner: dimension mismatch");
  }
  return (m.adjoint() * l).trace();
}

double trace_norm(const CMatrix& m) {
  // JacobiSVD is deterministic for a fixed input, unlike randomized solvers.
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Complex& z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

QuantumState::QuantumState(CMatrix mat) : mat_(std::move(mat)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 1) {
    throw std::invalid_argument("QuantumState: matrix must be square");
  }
  if (!all_finite(mat_)) {
    throw std::invalid_argument("QuantumState: non-finite entries");
  }
  if (trace_norm(mat_ - mat_.adjoint()) > kStateTol) {
    throw std::invalid_argument("QuantumState: not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(
      CMatrix(0.5 * (mat_ + mat_.adjoint())), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStateTol) {
    throw std::invalid_argument("QuantumState: not positive semi-definite");
  }
  if (std::abs(mat_.trace() - Complex(1.0, 0.0)) > kStateTol) {
    throw std::invalid_argument("QuantumState: trace differs from one");
  }
}

QuantumState QuantumState::maximally_mixed(Eigen::Index d) {
  return QuantumState(CMatrix::Identity(d, d) / static_cast<double>(d));
}

QuantumState QuantumState::pure_basis(Eigen::Index d, Eigen::Index k) {
  if (k < 0 || k >= d) {
    throw std::invalid_argument("pure_basis: index out of range");
  }
  CMatrix m = CMatrix::Zero(d, d);
  m(k, k) = 1.0;
  return QuantumState(m);
}

QuantumState psd_repair(const CMatrix& raw) {
  if (raw.rows() != raw.cols() || raw.rows() < 1) {
    throw std::invalid_argument("psd_repair: matrix must be square");
  }
  if (!all_finite(raw)) {
    throw std::invalid_argument("psd_repair: non-finite entries");
  }
  const CMatrix sym = 0.5 * (raw + raw.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  const Eigen::VectorXd evals = es.eigenvalues();

  const double herm_resid = trace_norm(raw - raw.adjoint());
  const double trace_err = std::abs(raw.trace() - Complex(1.0, 0.0));
  if (herm_resid <= 1e-12 && trace_err <= 1e-12 && evals.minCoeff() >= 0.0) {
    return QuantumState(raw);
  }

  Eigen::VectorXd clipped = evals.cwiseMax(0.0);
  const double total = clipped.sum();
  if (total < kNullTraceTol) {
    throw std::runtime_error("numerically null state");
  }
  clipped /= total;
  CMatrix fixed = es.eigenvectors() * clipped.asDiagonal() *
                  es.eigenvectors().adjoint();
  // Recomposition leaves O(eps) skew; symmetrize exactly.
  fixed = 0.5 * (fixed + fixed.adjoint());
  return QuantumState(std::move(fixed));
}

QuantumState project_action(const CMatrix& m, const QuantumState& theta,
                            double tol) {
  if (m.rows() != theta.dim() || m.cols() != theta.dim()) {
    throw std::invalid_argument("project_action: dimension mismatch");
  }
  if (tol <= 0.0) {
    throw std::invalid_argument("project_action: tol must be positive");
  }
  const CMatrix pushed = m * theta.mat() * m.adjoint();
  const double t = pushed.trace().real();
  if (t <= tol) {
    return QuantumState::maximally_mixed(theta.dim());
  }
  return psd_repair(pushed / t);
}

}  // namespace dqt
