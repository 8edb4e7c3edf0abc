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

#ifndef DQT_CHANNELS_HPP
#define DQT_CHANNELS_HPP

#include <span>
#include <string>
#include <vector>

#include "dqt/matrixcore.hpp"

namespace dqt {

// Residual thresholds: validation of a single Kraus set vs drift allowed to
// accumulate across compositions.
inline constexpr double kKrausTol = 1e-10;
inline constexpr double kCompositionTol = 1e-9;

/// One fiber of a random Kraus ensemble: an ordered alphabet of outcome
/// labels and one d x d operator per label, satisfying sum v^dag v = I.
struct KrausSet {
  Eigen::Index dim = 0;
  std::vector<std::string> labels;
  std::vector<CMatrix> ops;

  Eigen::Index size() const { return static_cast<Eigen::Index>(ops.size()); }

  /// Index of a label; throws std::invalid_argument when unknown.
  Eigen::Index label_index(const std::string& label) const;
};

struct KrausValidation {
  bool pass = false;
  double residual = 0.0;  // trace norm of sum v^dag v - I
};

/// Checks the stochasticity relation and basic shape invariants.
KrausValidation kraus_validate(const KrausSet& k);

/// Single-outcome super-operator T_a(M) = v_a M v_a^dag.
CMatrix apply_T(const KrausSet& k, Eigen::Index a, const CMatrix& m);
CMatrix apply_T(const KrausSet& k, const std::string& a, const CMatrix& m);

/// Adjoint T_a^dag(M) = v_a^dag M v_a, the HS dual of apply_T.
CMatrix apply_T_adjoint(const KrausSet& k, Eigen::Index a, const CMatrix& m);
CMatrix apply_T_adjoint(const KrausSet& k, const std::string& a,
                        const CMatrix& m);

/// A super-operator stored as its d^2 x d^2 matrix over column-major
/// vectorized inputs. With this convention the HS inner product on matrices
/// is the standard inner product on vec(), so adjoint() is just the matrix
/// adjoint.
class SuperOp {
 public:
  SuperOp(Eigen::Index dim, CMatrix rep, bool cptp = false);

  static SuperOp identity(Eigen::Index dim);

  Eigen::Index dim() const { return dim_; }
  const CMatrix& rep() const { return rep_; }
  bool cptp() const { return cptp_; }

  CMatrix apply(const CMatrix& m) const;
  SuperOp adjoint() const;
  SuperOp then(const SuperOp& later) const;  // later(this(.))

 private:
  Eigen::Index dim_;
  CMatrix rep_;
  bool cptp_;
};

/// The channel sum_a T_a of a valid Kraus set, flagged CPTP. Throws on sets
/// failing kraus_validate.
SuperOp channel_of(const KrausSet& k);

/// Direct channel application sum_a v_a M v_a^dag without building the
/// d^2 x d^2 representation.
CMatrix apply_channel(const KrausSet& k, const CMatrix& m);

/// Adjoint channel application sum_a v_a^dag M v_a.
CMatrix apply_channel_adjoint(const KrausSet& k, const CMatrix& m);

/// Composition applying chain[0] first; empty chain is the identity on
/// dimension dim.
SuperOp compose_forward(Eigen::Index dim, std::span<const KrausSet> chain);

/// The word operator v_{a_n}^(n) ... v_{a_1}^(1): later factors multiply on
/// the left. chain[i] supplies the operator for word[i].
CMatrix word_operator(std::span<const KrausSet> chain,
                      std::span<const Eigen::Index> word);

}  // namespace dqt

#endif  // DQT_CHANNELS_HPP
