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

#ifndef DQT_CONFIG_HPP
#define DQT_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dqt/ergodics.hpp"

namespace dqt {

enum class ExperimentKind {
  kValidate,
  kSimulate,
  kStationary,
  kCertify,
  kLln,
  kAnnealedLln,
  kQuenchedErg,
  kShiftCheck,
};

std::string experiment_kind_name(ExperimentKind kind);
std::optional<ExperimentKind> experiment_kind_from(const std::string& name);

/// Numeric knobs. Fields an experiment does not read are ignored; optional
/// fields fall back to experiment- and environment-specific defaults at run
/// time.
struct ExperimentParams {
  long long steps = 1000;
  long long trajectories = 200;
  long long n_max = 1024;
  std::optional<double> tol;         // experiment pass tolerance
  std::optional<double> solver_tol;  // Cesaro stopping tolerance
  long long solver_n_max = 4096;
  std::int64_t mc_samples = 256;
  std::vector<Eigen::Index> pattern;  // lln / quenched-erg window pattern
  std::vector<Eigen::Index> word;     // annealed-lln / shift-check word
  long long cylinder_start = 1;       // simulate-report cylinder start
  EnvEvent env_event;                 // annealed-lln F component
  int omega_samples = 3;
  int anchors = 3;
  int seed_states = 4;
  long long shift_n = 3;
  long long instances = 100;
  bool keep_states = false;
};

struct ExperimentConfig {
  Eigen::Index dimension = 0;
  std::vector<std::string> alphabet;
  std::shared_ptr<const EnvSystem> env;
  std::shared_ptr<const StateAssignment> initial_state;
  bool initial_is_stationary = false;
  ExperimentKind experiment = ExperimentKind::kValidate;
  ExperimentParams params;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  std::string source_path;
  std::uint64_t config_hash = 0;  // FNV-1a 64 of the raw config bytes
};

/// Thrown by load_config with every validation problem found, not just the
/// first.
class ConfigLoadError : public std::runtime_error {
 public:
  explicit ConfigLoadError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors);
  std::vector<std::string> errors_;
};

ExperimentConfig load_config(const std::string& path);

/// FNV-1a 64-bit hash, used to fingerprint config files in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace dqt

#endif  // DQT_CONFIG_HPP
