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

#ifndef DQT_TRAJECTORY_HPP
#define DQT_TRAJECTORY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "dqt/environment.hpp"
#include "dqt/state_spec.hpp"

namespace dqt {

/// One sampled run of the state-valued Markov chain: at step n the ensemble
/// of theta^n(omega) is measured, the outcome is drawn by the Born rule and
/// the state is conditioned on it.
struct TrajectoryRecord {
  EnvPoint env_start;
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> outcomes;
  std::vector<double> step_probs;
  std::vector<QuantumState> states;  // N+1 entries when kept, else empty
  double wall_clock_seconds = 0.0;
};

struct TrajectoryOptions {
  bool keep_states = false;
  double branch_tol = kNullTraceTol;
};

TrajectoryRecord sample_trajectory(const EnvSystem& env,
                                   const EnvPoint& omega0,
                                   const QuantumState& theta0, long long steps,
                                   std::uint64_t seed,
                                   const TrajectoryOptions& opts = {});

enum class OmegaMode { kFixed, kResampleInvariant };

struct BatchOptions {
  OmegaMode omega_mode = OmegaMode::kFixed;
  EnvPoint fixed_omega;  // used in kFixed mode
  TrajectoryOptions trajectory;
  int threads = 1;
};

/// count trajectories with per-index derived rng streams; the result is
/// bitwise identical for any thread count. Trajectory i uses the outcome
/// stream derive_seed(master_seed, i, 1) and, in resample mode, the
/// environment stream derive_seed(master_seed, i, 2).
std::vector<TrajectoryRecord> sample_batch(const EnvSystem& env,
                                           const StateAssignment& theta,
                                           long long steps, long long count,
                                           std::uint64_t master_seed,
                                           const BatchOptions& opts);

}  // namespace dqt

#endif  // DQT_TRAJECTORY_HPP
