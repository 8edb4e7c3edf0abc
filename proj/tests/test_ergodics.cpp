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

#include "dqt/ergodics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

using namespace dqt;
using namespace dqt::testing;

namespace {

KrausSet identity_set() {
  KrausSet k;
  k.dim = 2;
  k.labels = {"e"};
  k.ops = {CMatrix::Identity(2, 2)};
  return k;
}

EnvSystem periodic_ad_env() {
  return EnvSystem::periodic(
      {amplitude_damping(0.3),
       compose_unitary(amplitude_damping(0.5), hadamard())});
}

/// Fixed point of a 2x2-system channel composition via its eigenvalue-1
/// eigenvector, hermitized and trace-normalized.
QuantumState spectral_fixed_point(const SuperOp& phi) {
  Eigen::ComplexEigenSolver<CMatrix> es(phi.rep());
  Eigen::Index best = 0;
  double best_dist = 1e300;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double d = std::abs(es.eigenvalues()(i) - Complex(1.0, 0.0));
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  REQUIRE(best_dist < 1e-10);
  const Eigen::VectorXcd v = es.eigenvectors().col(best);
  CMatrix rho = Eigen::Map<const CMatrix>(v.data(), 2, 2);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return psd_repair(rho);
}

}  // namespace

TEST_CASE("stationary state of the constant depolarizing channel") {
  const EnvSystem env = EnvSystem::constant(depolarizing(0.4));
  const StationaryResult r = stationary_state(
      env, env.origin(), QuantumState::pure_basis(2, 0));
  CHECK(r.converged);
  CHECK(r.residual < 1e-10);
  CHECK(trace_norm(r.state.mat() - 0.5 * CMatrix::Identity(2, 2)) < 1e-9);
}

TEST_CASE("projective channel fixes diagonal states") {
  const EnvSystem env = EnvSystem::constant(projective2());
  CMatrix diag = CMatrix::Zero(2, 2);
  diag(0, 0) = 0.3;
  diag(1, 1) = 0.7;
  const StationaryResult r =
      stationary_state(env, env.origin(), QuantumState(diag));
  CHECK(r.converged);
  CHECK(trace_norm(r.state.mat() - diag) < 1e-9);
}

TEST_CASE("periodic stationary profile matches the spectral oracle") {
  const EnvSystem env = periodic_ad_env();
  StationaryOptions opts;
  opts.tol = 1e-12;
  opts.n_max = 1 << 15;

  // rho at phase 0 is the fixed point of (fiber at phase 0) o (fiber at
  // phase 1), i.e. the composition that applies the phase-1 channel first.
  const std::vector<KrausSet> one_period{env.fibers()[1], env.fibers()[0]};
  const QuantumState oracle0 =
      spectral_fixed_point(compose_forward(2, one_period));
  const StationaryResult r0 = stationary_state(
      env, env.origin(), QuantumState::maximally_mixed(2), opts);
  CHECK(r0.converged);
  CHECK(trace_norm(r0.state.mat() - oracle0.mat()) < 1e-8);

  // One-step stationarity: pushing rho_0 through the phase-1 channel gives
  // the profile at phase 1.
  const EnvPoint p1 = env.step(env.origin());
  const StationaryResult r1 =
      stationary_state(env, p1, QuantumState::maximally_mixed(2), opts);
  CHECK(trace_norm(apply_channel(env.ensemble_at(p1), r0.state.mat()) -
                   r1.state.mat()) < 1e-8);
}

TEST_CASE("stationary assignment solves at the given point") {
  const EnvSystem env = periodic_ad_env();
  StationaryOptions opts;
  opts.tol = 1e-10;
  const StationaryAssignment assign(opts);
  const QuantumState via_assign = assign.at(env, env.origin());
  const StationaryResult direct = stationary_state(
      env, env.origin(), QuantumState::maximally_mixed(2), opts);
  CHECK(trace_norm(via_assign.mat() - direct.state.mat()) < 1e-8);
  CHECK_FALSE(assign.constant_in_env());
}

TEST_CASE("dyn_erg_certify passes mixing systems and fails the projective") {
  Eigen::MatrixXd t(2, 2);
  t << 0.8, 0.2, 0.3, 0.7;
  CHECK(dyn_erg_certify(EnvSystem::constant(depolarizing(0.4))).pass);
  CHECK(dyn_erg_certify(
            EnvSystem::periodic({depolarizing(0.4), depolarizing(0.2)}))
            .pass);
  CHECK(dyn_erg_certify(
            EnvSystem::markov(t, {depolarizing(0.4), depolarizing(0.2)}))
            .pass);

  // The projective ensemble preserves every diagonal state, so limits from
  // different seeds disagree macroscopically.
  const CertifyReport bad =
      dyn_erg_certify(EnvSystem::constant(projective2()));
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_pair_distance >= 0.5);
}

TEST_CASE("verify_lln_outcomes on the identity ensemble is exact") {
  const EnvSystem env = EnvSystem::constant(identity_set());
  const FixedState theta(QuantumState::maximally_mixed(2));
  LLNOptions opts;
  opts.trajectories = 10;
  opts.steps = 50;
  const std::vector<Eigen::Index> pattern{0};
  const LLNReport r = verify_lln_outcomes(env, pattern, theta, opts);
  CHECK(r.empirical_mean == doctest::Approx(1.0));
  CHECK(r.target == doctest::Approx(1.0));
  CHECK(r.target_exact);
}

TEST_CASE("verify_lln_outcomes on the periodic damping system") {
  const EnvSystem env = periodic_ad_env();
  const FixedState theta(QuantumState::maximally_mixed(2));
  LLNOptions opts;
  opts.trajectories = 100;
  opts.steps = 800;
  opts.seed = 17;
  const std::vector<Eigen::Index> pattern{0};
  const LLNReport r = verify_lln_outcomes(env, pattern, theta, opts);
  CHECK(r.target_exact);
  CHECK(std::abs(r.z_score) < 4.0);
  CHECK(r.empirical_std_error > 0.0);
}

TEST_CASE("annealed lln terms vanish at the stationary profile") {
  const EnvSystem env = periodic_ad_env();
  StationaryOptions solver;
  solver.tol = 1e-12;
  solver.n_max = 1 << 15;
  const StationaryAssignment stationary(solver);
  AnnealedLLNOptions opts;
  opts.n_max = 64;
  opts.solver = solver;
  EnvEvent all;
  const std::vector<Eigen::Index> word{0};
  const AnnealedLLNReport r =
      verify_annealed_lln(env, stationary, all, word, opts);
  CHECK(r.target_exact);
  CHECK(r.max_term_gap < 1e-9);
  CHECK(r.checkpoints.back().gap < 1e-9);
}

TEST_CASE("annealed lln Cesaro gap shrinks with the horizon") {
  const EnvSystem env = EnvSystem::constant(amplitude_damping(0.3));
  const FixedState theta(QuantumState::pure_basis(2, 1));
  AnnealedLLNOptions opts;
  opts.n_max = 1000;
  opts.checkpoints = {20, 200, 1000};
  EnvEvent all;
  const std::vector<Eigen::Index> word{0};
  const AnnealedLLNReport r = verify_annealed_lln(env, theta, all, word, opts);
  REQUIRE(r.checkpoints.size() == 3);
  CHECK(r.checkpoints[1].gap < r.checkpoints[0].gap);
  CHECK(r.checkpoints[2].gap < r.checkpoints[1].gap);
  CHECK(r.checkpoints[2].gap < 1e-3);
}

TEST_CASE("depolarizing cylinder probabilities are already stationary") {
  // Every depolarizing Kraus operator is proportional to a unitary, so the
  // cylinder probabilities do not depend on the state and every Cesaro term
  // equals the target to roundoff.
  const EnvSystem env = EnvSystem::constant(depolarizing(0.4));
  const FixedState theta(QuantumState::pure_basis(2, 0));
  AnnealedLLNOptions opts;
  opts.n_max = 64;
  EnvEvent all;
  const std::vector<Eigen::Index> word{1};
  const AnnealedLLNReport r = verify_annealed_lln(env, theta, all, word, opts);
  CHECK(r.max_term_gap < 1e-12);
  CHECK(r.target == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("annealed lln restricted to a phase event") {
  const EnvSystem env = periodic_ad_env();
  const FixedState theta(QuantumState::maximally_mixed(2));
  AnnealedLLNOptions opts;
  opts.n_max = 256;
  EnvEvent phase0;
  phase0.all = false;
  phase0.symbols = {0};
  const std::vector<Eigen::Index> word{0};
  const AnnealedLLNReport r =
      verify_annealed_lln(env, theta, phase0, word, opts);
  CHECK(r.target_exact);
  // The event has measure 1/2, so the target is at most 1/2.
  CHECK(r.target <= 0.5 + 1e-12);
  CHECK(r.checkpoints.back().gap < 1e-2);
}

TEST_CASE("quenched ergodic check on the markov system") {
  Eigen::MatrixXd t(2, 2);
  t << 0.8, 0.2, 0.3, 0.7;
  const EnvSystem env =
      EnvSystem::markov(t, {depolarizing(0.4), depolarizing(0.2)});
  QuenchedErgOptions opts;
  opts.omega_samples = 2;
  opts.lln.trajectories = 50;
  opts.lln.steps = 500;
  opts.lln.seed = 23;
  opts.lln.target_mc_samples = 32;
  const std::vector<Eigen::Index> pattern{0};
  const QuenchedErgReport r = verify_quenched_ergodic(env, pattern, opts);
  CHECK(r.pass);
  CHECK(r.cells.size() == 4);  // 2 omegas x 2 default initial states
  CHECK(r.max_pair_z <= r.z_threshold_used);
  CHECK(r.max_conditional_z <= r.z_threshold_used);
  for (const QuenchedErgCell& cell : r.cells) {
    CHECK(cell.exact_conditional_mean > 0.0);
  }
}

TEST_CASE("annealed measure at the stationary profile is shift invariant") {
  const EnvSystem env = periodic_ad_env();
  StationaryOptions solver;
  solver.tol = 1e-12;
  solver.n_max = 1 << 15;
  const StationaryAssignment stationary(solver);
  for (Eigen::Index a = 0; a < 2; ++a) {
    CylinderSet start1;
    start1.start = 1;
    start1.word = {a};
    CylinderSet start2;
    start2.start = 2;
    start2.word = {a};
    const double p1 =
        annealed_cylinder(env, stationary, start1, IntegrationMode::kExact)
            .value;
    const double p2 =
        annealed_cylinder(env, stationary, start2, IntegrationMode::kExact)
            .value;
    CHECK(std::abs(p1 - p2) < 1e-8);
  }
}
