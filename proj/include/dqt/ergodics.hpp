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

#ifndef DQT_ERGODICS_HPP
#define DQT_ERGODICS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dqt/measures.hpp"
#include "dqt/trajectory.hpp"

namespace dqt {

struct StationaryOptions {
  long long n_max = 4096;
  double tol = 1e-8;
};

struct StationaryResult {
  QuantumState state;
  double residual = 0.0;  // one-step stationarity defect in trace norm
  long long iterations = 0;
  bool converged = false;
};

/// Solves for the stochastically stationary state at omega by averaging
/// backward-orbit channel pushforwards of the seed state. Averages are taken
/// over doubling windows (2^{k-1}, 2^k]; consecutive window averages within
/// tol stop the iteration. The windowed average has the same limit as the
/// plain running average whenever the latter converges, and converges
/// geometrically when the ensemble has a spectral gap.
StationaryResult stationary_state(const EnvSystem& env, const EnvPoint& omega,
                                  const QuantumState& seed_state,
                                  const StationaryOptions& opts = {});

/// omega -> stationary state, for use as an initial-state assignment.
class StationaryAssignment final : public StateAssignment {
 public:
  explicit StationaryAssignment(StationaryOptions opts = {})
      : opts_(opts) {}
  QuantumState at(const EnvSystem& env, const EnvPoint& omega) const override;
  bool constant_in_env() const override { return false; }

 private:
  StationaryOptions opts_;
};

struct CertifyOptions {
  int anchors = 3;
  int seed_states = 4;
  StationaryOptions solver;
  std::uint64_t seed = 0;
};

struct CertifyAnchor {
  double max_pair_distance = 0.0;
  double max_residual = 0.0;
  bool all_converged = true;
};

/// Heuristic check of dynamical ergodicity: solve from several seed states at
/// several invariant-sampled anchors and require all limits at each anchor to
/// coincide within 10 * tol. PASS is evidence, not proof.
struct CertifyReport {
  bool pass = false;
  double max_pair_distance = 0.0;
  double max_residual = 0.0;
  std::vector<CertifyAnchor> anchors;
};

CertifyReport dyn_erg_certify(const EnvSystem& env,
                              const CertifyOptions& opts = {});

struct LLNOptions {
  long long trajectories = 200;
  long long steps = 5000;
  std::uint64_t seed = 0;
  OmegaMode omega_mode = OmegaMode::kResampleInvariant;
  EnvPoint fixed_omega;
  int threads = 1;
  // Target integration: exact for constant/periodic, else Monte Carlo with
  // this many environment samples.
  std::int64_t target_mc_samples = 64;
  StationaryOptions solver;
};

struct LLNReport {
  std::vector<Eigen::Index> pattern;
  double empirical_mean = 0.0;
  double empirical_std_error = 0.0;
  double target = 0.0;
  double target_std_error = 0.0;
  bool target_exact = false;
  long long trajectories = 0;
  long long steps = 0;
  double z_score = 0.0;
  std::vector<double> per_trajectory;
};

/// Outcome-LLN check: sliding-window frequency of `pattern` along sampled
/// trajectories against the annealed stationary cylinder probability. The
/// target never reads theta; only the empirical side does.
LLNReport verify_lln_outcomes(const EnvSystem& env,
                              std::span<const Eigen::Index> pattern,
                              const StateAssignment& theta,
                              const LLNOptions& opts);

/// Environment event for product sets F x E: all of Omega or a set of
/// symbols (phases for periodic environments) read at the current position.
struct EnvEvent {
  bool all = true;
  std::vector<int> symbols;

  bool contains(int symbol) const;
};

struct AnnealedLLNOptions {
  long long n_max = 1000;
  std::vector<long long> checkpoints;  // defaults to doubling + n_max
  std::int64_t target_mc_samples = 256;
  std::uint64_t seed = 0;
  StationaryOptions solver;
};

struct AnnealedLLNRow {
  long long n = 0;
  double cesaro = 0.0;
  double gap = 0.0;  // |cesaro - target|
};

struct AnnealedLLNReport {
  double target = 0.0;
  double target_std_error = 0.0;
  bool target_exact = false;
  double max_term_gap = 0.0;  // max_n |term_n - target|
  std::vector<AnnealedLLNRow> checkpoints;
};

/// Annealed-LLN check: the exact Cesaro averages of the annealed probabilities
/// of tau^{-n}(F x E) against the annealed probability at the stationary
/// state. Exact terms require a finite-symbol environment.
AnnealedLLNReport verify_annealed_lln(const EnvSystem& env,
                                      const StateAssignment& theta,
                                      const EnvEvent& f_event,
                                      std::span<const Eigen::Index> e_word,
                                      const AnnealedLLNOptions& opts);

struct QuenchedErgOptions {
  int omega_samples = 3;
  std::vector<std::shared_ptr<const StateAssignment>> thetas;
  LLNOptions lln;
};

struct QuenchedErgCell {
  int omega_index = 0;
  int theta_index = 0;
  LLNReport report;
  // Exact conditional mean of the window frequency given this cell's fixed
  // omega: (1/N) sum_n of the quenched pattern probability at start n.
  double exact_conditional_mean = 0.0;
  double z_vs_conditional = 0.0;
};

struct QuenchedErgReport {
  bool pass = false;
  double z_threshold_used = 0.0;
  double max_pair_z = 0.0;
  double max_target_z = 0.0;
  double max_conditional_z = 0.0;
  // Per-theta variance of the exact conditional mean across disorder draws:
  // the finite-time Birkhoff offset shared by every trajectory of a cell.
  std::vector<double> disorder_variance;
  std::vector<QuenchedErgCell> cells;
};

/// Quenched-ergodicity check: Birkhoff averages must be compatible across fixed
/// disorder realizations and initial states. At finite N a fixed realization
/// carries an O(1/sqrt(N)) offset common to all its trajectories, invisible
/// to the across-trajectory standard error; comparisons across distinct
/// omega include the disorder variance of the exact conditional means,
/// estimated from lln.target_mc_samples independent invariant draws.
QuenchedErgReport verify_quenched_ergodic(const EnvSystem& env,
                                          std::span<const Eigen::Index> pattern,
                                          const QuenchedErgOptions& opts);

}  // namespace dqt

#endif  // DQT_ERGODICS_HPP
