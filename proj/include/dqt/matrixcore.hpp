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

#ifndef DQT_MATRIXCORE_HPP
#define DQT_MATRIXCORE_HPP

#include <Eigen/Dense>
#include <complex>

namespace dqt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Invariant tolerances for density matrices. States produced by long Kraus
// products are repaired back into this envelope (see psd_repair).
inline constexpr double kStateTol = 1e-10;
inline constexpr double kNullTraceTol = 1e-12;

/// Hilbert-Schmidt inner product Tr(M^dag L), conjugate-linear in the first
/// argument. Throws std::invalid_argument on dimension mismatch.
Complex hs_inner(const CMatrix& m, const CMatrix& l);

/// Schatten 1-norm: the sum of singular values of M.
double trace_norm(const CMatrix& m);

/// True if every entry of M is finite.
bool all_finite(const CMatrix& m);

/// A d x d positive semi-definite, trace-one complex matrix. Construction
/// checks Hermiticity, positivity and trace within kStateTol.
class QuantumState {
 public:
  explicit QuantumState(CMatrix mat);

  const CMatrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

  static QuantumState maximally_mixed(Eigen::Index d);
  static QuantumState pure_basis(Eigen::Index d, Eigen::Index k);

 private:
  CMatrix mat_;
};

/// Symmetrize, clip negative eigenvalues to zero and renormalize the trace.
/// Inputs already satisfying the state invariants within 1e-12 pass through
/// unchanged. Throws std::runtime_error("numerically null state") when the
/// clipped trace falls below kNullTraceTol.
QuantumState psd_repair(const CMatrix& raw);

/// Projective action M . theta = M theta M^dag / Tr(M theta M^dag), with the
/// degenerate branch returning the maximally mixed state when the trace does
/// not exceed tol.
QuantumState project_action(const CMatrix& m, const QuantumState& theta,
                            double tol = kNullTraceTol);

}  // namespace dqt

#endif  // DQT_MATRIXCORE_HPP
