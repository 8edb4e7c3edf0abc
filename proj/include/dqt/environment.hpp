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

#ifndef DQT_ENVIRONMENT_HPP
#define DQT_ENVIRONMENT_HPP

#include <memory>
#include <string>
#include <vector>

#include "dqt/channels.hpp"
#include "dqt/rng.hpp"

namespace dqt {

enum class EnvKind { kConstant, kPeriodic, kQuasiperiodic, kIid, kMarkov };

std::string env_kind_name(EnvKind kind);

/// Lazily materialized two-sided symbol sequence for the i.i.d. and Markov
/// shifts. Symbols are a pure function of (seed, index): forward symbols are
/// drawn from the forward kernel, backward symbols from the time-reversed
/// kernel, so the shift is genuinely invertible without storing an infinite
/// sequence. The cache is owned per point (shared only between copies of the
/// same point) and is not thread-safe across unrelated workers.
struct SymbolSequenceCache {
  std::vector<int> forward;   // symbol at index i for i >= 0
  std::vector<int> backward;  // symbol at index -(j+1)
};

/// A point of the base dynamical system. Which fields are meaningful depends
/// on the owning EnvSystem's kind.
struct EnvPoint {
  EnvKind kind = EnvKind::kConstant;

  // periodic
  int index = 0;

  // quasiperiodic: value is frac(base + steps * alpha); keeping the integer
  // step count makes step_back an exact inverse of step.
  double torus_base = 0.0;
  long long torus_steps = 0;

  // iid / markov
  std::uint64_t seq_seed = 0;
  long long seq_pos = 0;
  std::shared_ptr<SymbolSequenceCache> cache;

  double torus_value(double alpha) const;
};

/// Parametric fiber assignment for the torus environment: a registered
/// family name mapping (base Kraus set, torus coordinate) to a Kraus set.
/// Registered families:
///   "phase"    - pre-multiply by diag(1, e^{2 pi i x}, ..., e^{2 pi i (d-1) x})
///   "rotation" - pre-multiply by the planar rotation by 2 pi x in the
///                first two basis coordinates
KrausSet apply_torus_family(const std::string& name, const KrausSet& base,
                            double x);
bool torus_family_known(const std::string& name);

/// An invertible ergodic base system (Omega, P, theta) together with the
/// measurable assignment omega -> Kraus set.
class EnvSystem {
 public:
  static EnvSystem constant(KrausSet fiber);
  static EnvSystem periodic(std::vector<KrausSet> fibers);
  static EnvSystem quasiperiodic(std::string family, KrausSet base,
                                 double alpha = kGoldenAlpha);
  static EnvSystem iid(std::vector<double> weights,
                       std::vector<KrausSet> fibers);
  /// Markov shift; stationary may be empty, in which case it is computed by
  /// an eigenvector solve, or supplied and then verified.
  static EnvSystem markov(Eigen::MatrixXd transition,
                          std::vector<KrausSet> fibers,
                          std::vector<double> stationary = {});

  // Default torus rotation angle: frac((sqrt(5)-1)/2). A double is rational,
  // but the orbit does not recur over desk-scale horizons.
  static constexpr double kGoldenAlpha = 0.6180339887498949;

  EnvKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int symbol_count() const { return static_cast<int>(fibers_.size()); }
  double alpha() const { return alpha_; }
  const std::vector<double>& weights() const { return weights_; }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const std::vector<double>& stationary() const { return stationary_; }
  const std::vector<KrausSet>& fibers() const { return fibers_; }

  /// True when the invariant measure is supported on finitely many fiber
  /// configurations per coordinate (everything except the torus).
  bool finite_symbols() const { return kind_ != EnvKind::kQuasiperiodic; }

  /// Draw a point distributed per the invariant measure.
  EnvPoint sample_invariant(RngStream& rng) const;

  /// The unique point of a constant environment, phase 0 of a periodic one,
  /// torus coordinate 0, or the seeded sequence at position 0.
  EnvPoint origin(std::uint64_t seq_seed = 0) const;

  EnvPoint step(const EnvPoint& p) const;
  EnvPoint step_back(const EnvPoint& p) const;
  EnvPoint step_n(EnvPoint p, long long n) const;

  /// The fiber Kraus ensemble at a point. Deterministic in the point.
  KrausSet ensemble_at(const EnvPoint& p) const;

  /// Symbol read by ensemble_at for finite-symbol kinds.
  int symbol_at(const EnvPoint& p) const;

 private:
  EnvSystem() = default;
  void validate_fibers();

  EnvKind kind_ = EnvKind::kConstant;
  Eigen::Index dim_ = 0;
  std::vector<std::string> alphabet_;
  std::vector<KrausSet> fibers_;

  double alpha_ = kGoldenAlpha;
  std::string family_;
  std::vector<double> weights_;
  Eigen::MatrixXd transition_;
  std::vector<double> stationary_;
  Eigen::MatrixXd reverse_transition_;
};

}  // namespace dqt

#endif  // DQT_ENVIRONMENT_HPP
