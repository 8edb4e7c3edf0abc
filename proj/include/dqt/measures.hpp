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

#ifndef DQT_MEASURES_HPP
#define DQT_MEASURES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dqt/environment.hpp"
#include "dqt/state_spec.hpp"

namespace dqt {

/// The measurable rectangle A_start(word): outcome word[0] at time `start`,
/// word[1] at start+1, and so on. start >= 1.
struct CylinderSet {
  long long start = 1;
  std::vector<Eigen::Index> word;
};

/// Probability Tr(V theta V^dag) of observing `word` from time 1 on, for
/// the orbit of omega. Empty word has probability 1.
double quenched_cylinder(const EnvSystem& env, const EnvPoint& omega,
                         const QuantumState& theta,
                         std::span<const Eigen::Index> word);

/// Probability of a cylinder starting at an arbitrary time: the free prefix
/// letters are marginalized by evolving theta through the first start-1
/// channels of the orbit.
double quenched_cylinder_at(const EnvSystem& env, const EnvPoint& omega,
                            const QuantumState& theta, const CylinderSet& cyl);

/// Value of the matrix-valued quenched measure on a start-1 cylinder:
/// the nested adjoint image of the identity. Hermitian, PSD, bounded by I.
/// Empty word returns I (the whole outcome space).
CMatrix matrix_measure_cylinder(const EnvSystem& env, const EnvPoint& omega,
                                std::span<const Eigen::Index> word);

/// Trace-norm residual between the two routes to the matrix measure of
/// sigma^{-n}(E), E a start-1 cylinder word: enumeration of the |A|^n free
/// prefixes versus the adjoint of the n-step composed channel. Throws when
/// the enumeration exceeds `budget` prefixes.
double shift_identity_residual(const EnvSystem& env, const EnvPoint& omega,
                               long long n, std::span<const Eigen::Index> word,
                               std::int64_t budget = 1 << 20);

enum class IntegrationMode { kExact, kMonteCarlo };

struct AnnealedEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for exact mode
  bool exact = false;
  std::int64_t samples = 0;

  double three_sigma() const { return 3.0 * std_error; }
};

/// The annealed probability of a cylinder: the environment average of
/// quenched_cylinder_at. Exact mode sums over the finitely many environment
/// windows the cylinder reads (constant, periodic, iid, markov); it throws
/// for the torus ("quadrature unavailable; use mc") and, for the sequence
/// kinds, requires an omega-independent state assignment. Monte Carlo mode
/// samples invariant-distributed environment points.
AnnealedEstimate annealed_cylinder(const EnvSystem& env,
                                   const StateAssignment& theta,
                                   const CylinderSet& cyl, IntegrationMode mode,
                                   std::int64_t mc_samples = 0,
                                   std::uint64_t seed = 0, int threads = 1);

/// Probability of `word` when the per-step ensembles are given explicitly:
/// chain[i] is the ensemble for time i+1. Evolves theta through the first
/// start-1 channels and applies the word operator on the rest.
double cylinder_prob_on_chain(std::span<const KrausSet> chain,
                              const QuantumState& theta, long long start,
                              std::span<const Eigen::Index> word);

}  // namespace dqt

#endif  // DQT_MEASURES_HPP
