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

#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"

using namespace dqt;
using namespace dqt::testing;

TEST_CASE("hs_inner basics") {
  const CMatrix id = CMatrix::Identity(2, 2);
  CHECK(hs_inner(id, id).real() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(hs_inner(pauli_x(), pauli_z())) == doctest::Approx(0.0));

  RngStream rng(11);
  const CMatrix m = random_cmatrix(3, 3, rng);
  const CMatrix l = random_cmatrix(3, 3, rng);
  Complex oracle = 0.0;
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      oracle += std::conj(m(r, c)) * l(r, c);
    }
  }
  CHECK(std::abs(hs_inner(m, l) - oracle) < 1e-12);

  // <M, M> is a squared norm.
  const Complex self = hs_inner(m, m);
  CHECK(self.real() >= 0.0);
  CHECK(std::abs(self.imag()) < 1e-12);

  CHECK_THROWS_AS(hs_inner(m, CMatrix::Identity(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("trace_norm against eigen oracle") {
  CHECK(trace_norm(CMatrix::Identity(5, 5)) ==
        doctest::Approx(5.0).epsilon(1e-13));
  CMatrix d12(2, 2);
  d12 << 1, 0, 0, -2;
  CHECK(trace_norm(d12) == doctest::Approx(3.0).epsilon(1e-13));

  RngStream rng(12);
  const CMatrix g = random_cmatrix(4, 4, rng);
  const CMatrix herm = g + g.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  double oracle = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    oracle += std::abs(es.eigenvalues()(i));
  }
  CHECK(trace_norm(herm) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("trace_norm triangle inequality on random triples") {
  RngStream rng(13);
  for (int i = 0; i < 20; ++i) {
    const CMatrix a = random_cmatrix(3, 3, rng);
    const CMatrix b = random_cmatrix(3, 3, rng);
    CHECK(trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10);
  }
}

TEST_CASE("project_action") {
  const QuantumState mixed = QuantumState::maximally_mixed(2);
  const QuantumState e0 = QuantumState::pure_basis(2, 0);
  const QuantumState e1 = QuantumState::pure_basis(2, 1);

  RngStream rng(14);
  const QuantumState theta = random_state(2, rng);
  const QuantumState same =
      project_action(CMatrix::Identity(2, 2), theta);
  CHECK(trace_norm(same.mat() - theta.mat()) < 1e-12);

  const QuantumState collapsed = project_action(e0.mat(), mixed);
  CHECK(trace_norm(collapsed.mat() - e0.mat()) < 1e-12);

  // Null branch: the fallback is the maximally mixed state.
  const QuantumState fallback = project_action(e0.mat(), e1);
  CHECK(trace_norm(fallback.mat() - mixed.mat()) < 1e-12);
}

TEST_CASE("project_action output always passes state invariants") {
  RngStream rng(15);
  for (int i = 0; i < 50; ++i) {
    const CMatrix m = random_cmatrix(3, 3, rng);
    const QuantumState out = project_action(m, random_state(3, rng));
    CHECK(std::abs(out.mat().trace().real() - 1.0) < 1e-10);
    CHECK(trace_norm(out.mat() - out.mat().adjoint()) < 1e-10);
  }
}

TEST_CASE("psd_repair") {
  RngStream rng(16);
  const QuantumState exact = random_state(2, rng);
  const QuantumState same = psd_repair(exact.mat());
  CHECK((same.mat() - exact.mat()).cwiseAbs().maxCoeff() == 0.0);

  CMatrix slight(2, 2);
  slight << 1.0 + 1e-13, 0, 0, -1e-13;
  const QuantumState clipped = psd_repair(slight);
  CHECK(clipped.mat()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(clipped.mat()(1, 1).real() == doctest::Approx(0.0));

  CMatrix scaled(2, 2);
  scaled << 0.6, 0, 0, 0.6;
  const QuantumState renorm = psd_repair(scaled);
  CHECK(renorm.mat()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-13));

  CHECK_THROWS_WITH_AS(psd_repair(CMatrix::Zero(2, 2)),
                       "numerically null state", std::runtime_error);
}

TEST_CASE("QuantumState construction enforces invariants") {
  CMatrix bad_trace(2, 2);
  bad_trace << 0.7, 0, 0, 0.7;
  CHECK_THROWS_AS(QuantumState{bad_trace}, std::invalid_argument);

  CMatrix not_psd(2, 2);
  not_psd << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(QuantumState{not_psd}, std::invalid_argument);

  CMatrix not_herm(2, 2);
  not_herm << 0.5, 0.3, 0.0, 0.5;
  CHECK_THROWS_AS(QuantumState{not_herm}, std::invalid_argument);

  const QuantumState mixed = QuantumState::maximally_mixed(3);
  CHECK(mixed.dim() == 3);
  const QuantumState pure = QuantumState::pure_basis(3, 2);
  CHECK(pure.mat()(2, 2).real() == doctest::Approx(1.0));
}
