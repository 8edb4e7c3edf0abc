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

#include "dqt/trajectory.hpp"

#include <chrono>
#include <stdexcept>

#include "dqt/parallel.hpp"

namespace dqt {

TrajectoryRecord sample_trajectory(const EnvSystem& env,
                                   const EnvPoint& omega0,
                                   const QuantumState& theta0, long long steps,
                                   std::uint64_t seed,
                                   const TrajectoryOptions& opts) {
  if (steps < 1) {
    throw std::invalid_argument("sample_trajectory: steps must be >= 1");
  }
  const auto t0 = std::chrono::steady_clock::now();

  TrajectoryRecord rec;
  rec.env_start = omega0;
  rec.seed = seed;
  rec.outcomes.reserve(static_cast<std::size_t>(steps));
  rec.step_probs.reserve(static_cast<std::size_t>(steps));
  if (opts.keep_states) {
    rec.states.reserve(static_cast<std::size_t>(steps) + 1);
    rec.states.push_back(theta0);
  }

  RngStream rng(seed);
  QuantumState rho = theta0;
  EnvPoint point = omega0;
  for (long long n = 1; n <= steps; ++n) {
    point = env.step(point);
    const KrausSet ensemble = env.ensemble_at(point);
    const Eigen::Index n_out = ensemble.size();

    // Born-rule weights in alphabet order; the roundoff residual is assigned
    // to the final label.
    std::vector<double> probs(static_cast<std::size_t>(n_out), 0.0);
    double best = 0.0;
    for (Eigen::Index a = 0; a < n_out; ++a) {
      const CMatrix& v = ensemble.ops[static_cast<std::size_t>(a)];
      const double p = (v * rho.mat() * v.adjoint()).trace().real();
      probs[static_cast<std::size_t>(a)] = p;
      if (p > best) best = p;
    }
    if (best <= opts.branch_tol) {
      throw std::runtime_error("sample_trajectory: numerically null branching");
    }

    const double u = rng.next_double();
    Eigen::Index picked = n_out - 1;
    double acc = 0.0;
    for (Eigen::Index a = 0; a + 1 < n_out; ++a) {
      acc += probs[static_cast<std::size_t>(a)];
      if (u < acc) {
        picked = a;
        break;
      }
    }
    // The sampled branch can still be the (numerically) null final label.
    if (probs[static_cast<std::size_t>(picked)] <= opts.branch_tol) {
      Eigen::Index fallback = 0;
      for (Eigen::Index a = 0; a < n_out; ++a) {
        if (probs[static_cast<std::size_t>(a)] >
            probs[static_cast<std::size_t>(fallback)]) {
          fallback = a;
        }
      }
      picked = fallback;
    }

    rho = project_action(ensemble.ops[static_cast<std::size_t>(picked)], rho,
                         opts.branch_tol);
    rec.outcomes.push_back(picked);
    rec.step_probs.push_back(probs[static_cast<std::size_t>(picked)]);
    if (opts.keep_states) rec.states.push_back(rho);
  }

  rec.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

std::vector<TrajectoryRecord> sample_batch(const EnvSystem& env,
                                           const StateAssignment& theta,
                                           long long steps, long long count,
                                           std::uint64_t master_seed,
                                           const BatchOptions& opts) {
  if (count < 1) {
    throw std::invalid_argument("sample_batch: count must be >= 1");
  }
  std::vector<TrajectoryRecord> records(static_cast<std::size_t>(count));
  parallel_for_index(count, opts.threads, [&](std::int64_t i) {
    const std::uint64_t traj_seed =
        derive_seed(master_seed, static_cast<std::uint64_t>(i), /*tag=*/1);
    EnvPoint start;
    if (opts.omega_mode == OmegaMode::kFixed) {
      start = opts.fixed_omega;
      if (start.cache) {
        // Own the lazy symbol cache per worker.
        start.cache = std::make_shared<SymbolSequenceCache>(*start.cache);
      }
    } else {
      RngStream env_rng(
          derive_seed(master_seed, static_cast<std::uint64_t>(i), /*tag=*/2));
      start = env.sample_invariant(env_rng);
    }
    records[static_cast<std::size_t>(i)] = sample_trajectory(
        env, start, theta.at(env, start), steps, traj_seed, opts.trajectory);
  });
  return records;
}

}  // namespace dqt
