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

#include "dqt/environment.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

using namespace dqt;
using namespace dqt::testing;

namespace {

std::vector<KrausSet> four_fibers() {
  return {depolarizing(0.1), depolarizing(0.2), depolarizing(0.3),
          depolarizing(0.4)};
}

bool same_kraus(const KrausSet& a, const KrausSet& b) {
  if (a.dim != b.dim || a.labels != b.labels) return false;
  for (std::size_t i = 0; i < a.ops.size(); ++i) {
    if ((a.ops[i] - b.ops[i]).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("constant environment has a single point") {
  const EnvSystem env = EnvSystem::constant(depolarizing(0.4));
  CHECK(env.kind() == EnvKind::kConstant);
  CHECK(env.dim() == 2);
  CHECK(env.symbol_count() == 1);

  RngStream rng(31);
  const EnvPoint a = env.origin();
  const EnvPoint b = env.sample_invariant(rng);
  const EnvPoint c = env.step(env.step(a));
  CHECK(same_kraus(env.ensemble_at(a), env.ensemble_at(b)));
  CHECK(same_kraus(env.ensemble_at(a), env.ensemble_at(c)));
  CHECK(env.symbol_at(c) == 0);
}

TEST_CASE("periodic invariant measure is uniform over phases") {
  const EnvSystem env = EnvSystem::periodic(four_fibers());
  CHECK(env.symbol_count() == 4);

  RngStream rng(32);
  const int draws = 100000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < draws; ++i) {
    ++counts[env.symbol_at(env.sample_invariant(rng))];
  }
  const double se = std::sqrt(0.25 * 0.75 / draws);
  for (int s = 0; s < 4; ++s) {
    CHECK(std::abs(counts[s] / double(draws) - 0.25) < 3.0 * se);
  }
}

TEST_CASE("periodic phases alternate deterministically") {
  const EnvSystem env =
      EnvSystem::periodic({depolarizing(0.1), depolarizing(0.7)});
  EnvPoint p = env.origin();
  CHECK(same_kraus(env.ensemble_at(p), depolarizing(0.1)));
  p = env.step(p);
  CHECK(same_kraus(env.ensemble_at(p), depolarizing(0.7)));
  p = env.step(p);
  CHECK(same_kraus(env.ensemble_at(p), depolarizing(0.1)));
}

TEST_CASE("markov invariant measure matches the stationary vector") {
  Eigen::MatrixXd t(2, 2);
  t << 0.8, 0.2, 0.3, 0.7;
  const EnvSystem env =
      EnvSystem::markov(t, {depolarizing(0.4), depolarizing(0.2)});
  REQUIRE(env.stationary().size() == 2);
  CHECK(env.stationary()[0] == doctest::Approx(0.6).epsilon(1e-12));

  RngStream rng(33);
  const int draws = 100000;
  int count0 = 0;
  int count0_stepped = 0;
  for (int i = 0; i < draws; ++i) {
    const EnvPoint p = env.sample_invariant(rng);
    if (env.symbol_at(p) == 0) ++count0;
    // Measure preservation: the law of step(omega) is again invariant.
    if (env.symbol_at(env.step(p)) == 0) ++count0_stepped;
  }
  const double se = std::sqrt(0.6 * 0.4 / draws);
  CHECK(std::abs(count0 / double(draws) - 0.6) < 3.0 * se);
  CHECK(std::abs(count0_stepped / double(draws) - 0.6) < 3.0 * se);
}

TEST_CASE("iid symbol frequencies match the weights") {
  const EnvSystem env =
      EnvSystem::iid({0.3, 0.7}, {depolarizing(0.4), depolarizing(0.2)});
  RngStream rng(34);
  const int draws = 100000;
  int count0 = 0;
  for (int i = 0; i < draws; ++i) {
    if (env.symbol_at(env.sample_invariant(rng)) == 0) ++count0;
  }
  const double se = std::sqrt(0.3 * 0.7 / draws);
  CHECK(std::abs(count0 / double(draws) - 0.3) < 3.0 * se);

  // Along one orbit the symbols are iid too; check a long Birkhoff sum.
  EnvPoint p = env.origin(99);
  int along = 0;
  for (int n = 0; n < draws; ++n) {
    if (env.symbol_at(p) == 0) ++along;
    p = env.step(p);
  }
  CHECK(std::abs(along / double(draws) - 0.3) < 4.0 * se);
}

TEST_CASE("sequence symbols are a pure function of the seed") {
  const EnvSystem env =
      EnvSystem::iid({0.5, 0.5}, {depolarizing(0.4), depolarizing(0.2)});
  const EnvPoint a = env.origin(1234);
  const EnvPoint b = env.origin(1234);  // fresh cache, same seed
  for (long long n = -10; n <= 10; ++n) {
    CHECK(env.symbol_at(env.step_n(a, n)) == env.symbol_at(env.step_n(b, n)));
  }
}

TEST_CASE("quasiperiodic step rotates by alpha modulo one") {
  const EnvSystem env =
      EnvSystem::quasiperiodic("phase", depolarizing(0.4), 0.25);
  EnvPoint p = env.origin();
  CHECK(p.torus_value(env.alpha()) == doctest::Approx(0.0));
  p = env.step(p);
  CHECK(p.torus_value(env.alpha()) == doctest::Approx(0.25).epsilon(1e-14));
  p = env.step_n(p, 3);
  CHECK(p.torus_value(env.alpha()) == doctest::Approx(0.0));

  // A point with base 0.9 wraps to 0.15.
  RngStream rng(35);
  EnvPoint q = env.sample_invariant(rng);
  q.torus_base = 0.9;
  q.torus_steps = 0;
  CHECK(env.step(q).torus_value(env.alpha()) ==
        doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("torus family fibers stay stochastic along the orbit") {
  CHECK(torus_family_known("phase"));
  CHECK(torus_family_known("rotation"));
  CHECK_FALSE(torus_family_known("nope"));
  CHECK_THROWS_AS(apply_torus_family("nope", depolarizing(0.4), 0.1),
                  std::invalid_argument);

  for (const char* family : {"phase", "rotation"}) {
    const EnvSystem env =
        EnvSystem::quasiperiodic(family, depolarizing(0.4));
    RngStream rng(36);
    EnvPoint p = env.sample_invariant(rng);
    for (int n = 0; n < 1000; ++n) {
      p = env.step(p);
      if (n % 50 == 0) {
        const KrausValidation v = kraus_validate(env.ensemble_at(p));
        CHECK(v.pass);
        CHECK(v.residual < 1e-12);
      }
    }
  }
}

TEST_CASE("step_back inverts step exactly for every kind") {
  Eigen::MatrixXd t(2, 2);
  t << 0.8, 0.2, 0.3, 0.7;
  const std::vector<EnvSystem> systems = {
      EnvSystem::constant(depolarizing(0.4)),
      EnvSystem::periodic(four_fibers()),
      EnvSystem::quasiperiodic("phase", depolarizing(0.4)),
      EnvSystem::iid({0.5, 0.5}, {depolarizing(0.4), depolarizing(0.2)}),
      EnvSystem::markov(t, {depolarizing(0.4), depolarizing(0.2)})};

  RngStream rng(37);
  for (const EnvSystem& env : systems) {
    EnvPoint p = env.sample_invariant(rng);
    // Wander both directions and check the round trips land back exactly.
    for (int n = 0; n < 25; ++n) {
      const EnvPoint fwd = env.step(p);
      const EnvPoint back = env.step_back(fwd);
      CHECK(same_kraus(env.ensemble_at(back), env.ensemble_at(p)));
      const EnvPoint bwd = env.step_back(p);
      CHECK(same_kraus(env.ensemble_at(env.step(bwd)), env.ensemble_at(p)));
      p = (n % 2 == 0) ? fwd : bwd;
    }
    // step_n agrees with iterated single steps.
    EnvPoint q = env.sample_invariant(rng);
    EnvPoint iter = q;
    for (int n = 0; n < 7; ++n) iter = env.step(iter);
    CHECK(same_kraus(env.ensemble_at(env.step_n(q, 7)),
                     env.ensemble_at(iter)));
    CHECK(same_kraus(env.ensemble_at(env.step_n(iter, -7)),
                     env.ensemble_at(q)));
  }
}

TEST_CASE("ensemble_at is deterministic in the point") {
  Eigen::MatrixXd t(2, 2);
  t << 0.8, 0.2, 0.3, 0.7;
  const EnvSystem env =
      EnvSystem::markov(t, {depolarizing(0.4), depolarizing(0.2)});
  RngStream rng(38);
  const EnvPoint p = env.step_n(env.sample_invariant(rng), 11);
  CHECK(same_kraus(env.ensemble_at(p), env.ensemble_at(p)));
}

TEST_CASE("constructors reject invalid inputs") {
  KrausSet bad;
  bad.dim = 2;
  bad.labels = {"e"};
  bad.ops = {2.0 * CMatrix::Identity(2, 2)};
  CHECK_THROWS_AS(EnvSystem::constant(bad), std::invalid_argument);
  CHECK_THROWS_AS(EnvSystem::periodic({}), std::invalid_argument);
  CHECK_THROWS_AS(
      EnvSystem::iid({0.4, 0.4}, {depolarizing(0.1), depolarizing(0.2)}),
      std::invalid_argument);

  Eigen::MatrixXd not_stochastic(2, 2);
  not_stochastic << 0.8, 0.3, 0.3, 0.7;
  CHECK_THROWS_AS(
      EnvSystem::markov(not_stochastic,
                        {depolarizing(0.1), depolarizing(0.2)}),
      std::invalid_argument);

  // Fibers must share the dimension.
  RngStream rng(39);
  CHECK_THROWS_AS(
      EnvSystem::periodic({depolarizing(0.1), random_kraus(3, 2, rng)}),
      std::invalid_argument);
}
