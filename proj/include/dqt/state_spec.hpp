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

#ifndef DQT_STATE_SPEC_HPP
#define DQT_STATE_SPEC_HPP

#include "dqt/environment.hpp"
#include "dqt/matrixcore.hpp"

namespace dqt {

/// A random quantum state omega -> theta_omega. Fixed states ignore the
/// point; the stationary-profile assignment (ergodics module) solves at the
/// point.
class StateAssignment {
 public:
  virtual ~StateAssignment() = default;
  virtual QuantumState at(const EnvSystem& env, const EnvPoint& omega) const = 0;
  /// True when the assignment does not read omega; exact annealed
  /// integration over sequence environments requires this.
  virtual bool constant_in_env() const = 0;
};

class FixedState final : public StateAssignment {
 public:
  explicit FixedState(QuantumState state) : state_(std::move(state)) {}
  QuantumState at(const EnvSystem&, const EnvPoint&) const override {
    return state_;
  }
  bool constant_in_env() const override { return true; }

 private:
  QuantumState state_;
};

}  // namespace dqt

#endif  // DQT_STATE_SPEC_HPP
