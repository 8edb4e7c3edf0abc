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

#ifndef DQT_TESTS_HELPERS_HPP
#define DQT_TESTS_HELPERS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "dqt/channels.hpp"
#include "dqt/rng.hpp"

namespace dqt::testing {

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline CMatrix hadamard() {
  CMatrix m(2, 2);
  const double h = 1.0 / std::sqrt(2.0);
  m << h, h, h, -h;
  return m;
}

inline KrausSet depolarizing(double p) {
  const double a = std::sqrt(1.0 - 0.75 * p);
  const double b = std::sqrt(p / 4.0);
  KrausSet k;
  k.dim = 2;
  k.labels = {"I", "X", "Y", "Z"};
  k.ops = {a * CMatrix::Identity(2, 2), b * pauli_x(), b * pauli_y(),
           b * pauli_z()};
  return k;
}

inline KrausSet projective2() {
  KrausSet k;
  k.dim = 2;
  k.labels = {"P0", "P1"};
  CMatrix p0 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  CMatrix p1 = CMatrix::Zero(2, 2);
  p1(1, 1) = 1.0;
  k.ops = {p0, p1};
  return k;
}

inline KrausSet amplitude_damping(double g) {
  KrausSet k;
  k.dim = 2;
  k.labels = {"a", "b"};
  CMatrix k0 = CMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - g);
  CMatrix k1 = CMatrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(g);
  k.ops = {k0, k1};
  return k;
}

/// Post-multiply every operator by a unitary; preserves stochasticity.
inline KrausSet compose_unitary(KrausSet k, const CMatrix& u) {
  for (CMatrix& op : k.ops) op = op * u;
  return k;
}

inline CMatrix random_cmatrix(Eigen::Index rows, Eigen::Index cols,
                              RngStream& rng) {
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = Complex(rng.next_gaussian(), rng.next_gaussian());
    }
  }
  return m;
}

/// Random valid Kraus set: QR of a tall Ginibre matrix gives an isometry
/// whose d x d blocks satisfy the stochasticity relation exactly.
inline KrausSet random_kraus(Eigen::Index d, Eigen::Index n_ops,
                             RngStream& rng) {
  const CMatrix g = random_cmatrix(d * n_ops, d, rng);
  const CMatrix q =
      Eigen::HouseholderQR<CMatrix>(g).householderQ() *
      CMatrix::Identity(d * n_ops, d);
  KrausSet k;
  k.dim = d;
  for (Eigen::Index a = 0; a < n_ops; ++a) {
    k.labels.push_back("k" + std::to_string(a));
    k.ops.push_back(q.block(a * d, 0, d, d));
  }
  return k;
}

inline QuantumState random_state(Eigen::Index d, RngStream& rng) {
  const CMatrix g = random_cmatrix(d, d, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return psd_repair(rho);
}

}  // namespace dqt::testing

#endif  // DQT_TESTS_HELPERS_HPP
