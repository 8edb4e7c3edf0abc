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

#ifndef DQT_EXPERIMENTS_HPP
#define DQT_EXPERIMENTS_HPP

#include <optional>
#include <string>

#include "dqt/config.hpp"

namespace dqt {

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  int threads = 1;
};

/// Dispatches the configured experiment, writing its CSV tables plus a run
/// manifest (config hash, seed, thread count, wall time) into the output
/// directory. Returns 0 on PASS/success, 1 on FAIL. Module errors propagate
/// as exceptions. CSV bodies are byte-identical across reruns with the same
/// seed, independent of the thread count; timestamps live only in the
/// manifest.
int run_experiment(const ExperimentConfig& config, const RunOptions& opts);

/// The Cesaro stopping tolerance used when the config does not pin one:
/// 1e-8 for the deterministic environments, 1e-5 for the stochastic shifts,
/// whose backward orbits mix more slowly.
double default_solver_tol(const EnvSystem& env);

}  // namespace dqt

#endif  // DQT_EXPERIMENTS_HPP
