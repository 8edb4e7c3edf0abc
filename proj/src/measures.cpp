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

#include "dqt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dqt/parallel.hpp"
#include "dqt/stats.hpp"

namespace dqt {

namespace {

// Ensembles along theta^1(omega) .. theta^len(omega).
std::vector<KrausSet> orbit_chain(const EnvSystem& env, const EnvPoint& omega,
                                  long long len) {
  std::vector<KrausSet> chain;
  chain.reserve(static_cast<std::size_t>(len));
  EnvPoint p = omega;
  for (long long i = 0; i < len; ++i) {
    p = env.step(p);
    chain.push_back(env.ensemble_at(p));
  }
  return chain;
}

void check_word(const EnvSystem& env, std::span<const Eigen::Index> word) {
  const Eigen::Index n_labels =
      static_cast<Eigen::Index>(env.alphabet().size());
  for (Eigen::Index a : word) {
    if (a < 0 || a >= n_labels) {
      throw std::invalid_argument("cylinder word: label index out of range");
    }
  }
}

// Symbol-path model of a finite-symbol environment: initial law of the
// symbol at time 1 and the one-step kernel. The torus has no such model.
struct SymbolModel {
  std::vector<double> initial;
  Eigen::MatrixXd kernel;  // kernel(s, s') = P(next = s' | current = s)
};

SymbolModel symbol_model(const EnvSystem& env) {
  SymbolModel m;
  switch (env.kind()) {
    case EnvKind::kConstant:
      m.initial = {1.0};
      m.kernel = Eigen::MatrixXd::Ones(1, 1);
      return m;
    case EnvKind::kPeriodic: {
      const int k = env.symbol_count();
      m.initial.assign(static_cast<std::size_t>(k), 1.0 / k);
      m.kernel = Eigen::MatrixXd::Zero(k, k);
      for (int s = 0; s < k; ++s) m.kernel(s, (s + 1) % k) = 1.0;
      return m;
    }
    case EnvKind::kIid: {
      const int k = env.symbol_count();
      m.initial = env.weights();
      m.kernel = Eigen::MatrixXd::Zero(k, k);
      for (int s = 0; s < k; ++s) {
        for (int t = 0; t < k; ++t) m.kernel(s, t) = env.weights()[t];
      }
      return m;
    }
    case EnvKind::kMarkov:
      m.initial = env.stationary();
      m.kernel = env.transition();
      return m;
    case EnvKind::kQuasiperiodic:
      break;
  }
  throw std::invalid_argument("annealed: quadrature unavailable; use mc");
}

}  // namespace

double cylinder_prob_on_chain(std::span<const KrausSet> chain,
                              const QuantumState& theta, long long start,
                              std::span<const Eigen::Index> word) {
  if (start < 1) {
    throw std::invalid_argument("cylinder: start must be >= 1");
  }
  const long long len = start - 1 + static_cast<long long>(word.size());
  if (static_cast<long long>(chain.size()) != len) {
    throw std::invalid_argument("cylinder: chain length mismatch");
  }
  if (word.empty()) return 1.0;
  const Eigen::Index d = theta.dim();
  // Marginalizing the free prefix letters telescopes into full channel
  // applications.
  CMatrix rho = theta.mat();
  for (long long i = 0; i < start - 1; ++i) {
    rho = apply_channel(chain[static_cast<std::size_t>(i)], rho);
  }
  CMatrix v = CMatrix::Identity(d, d);
  for (std::size_t i = 0; i < word.size(); ++i) {
    const KrausSet& k = chain[static_cast<std::size_t>(start - 1) + i];
    const Eigen::Index a = word[i];
    if (a < 0 || a >= k.size()) {
      throw std::invalid_argument("cylinder word: label index out of range");
    }
    v = k.ops[static_cast<std::size_t>(a)] * v;
  }
  return (v * rho * v.adjoint()).trace().real();
}

double quenched_cylinder(const EnvSystem& env, const EnvPoint& omega,
                         const QuantumState& theta,
                         std::span<const Eigen::Index> word) {
  check_word(env, word);
  if (word.empty()) return 1.0;
  const std::vector<KrausSet> chain =
      orbit_chain(env, omega, static_cast<long long>(word.size()));
  return cylinder_prob_on_chain(chain, theta, 1, word);
}

double quenched_cylinder_at(const EnvSystem& env, const EnvPoint& omega,
                            const QuantumState& theta, const CylinderSet& cyl) {
  check_word(env, cyl.word);
  if (cyl.start < 1) {
    throw std::invalid_argument("cylinder: start must be >= 1");
  }
  if (cyl.word.empty()) return 1.0;
  const long long len =
      cyl.start - 1 + static_cast<long long>(cyl.word.size());
  const std::vector<KrausSet> chain = orbit_chain(env, omega, len);
  return cylinder_prob_on_chain(chain, theta, cyl.start, cyl.word);
}

CMatrix matrix_measure_cylinder(const EnvSystem& env, const EnvPoint& omega,
                                std::span<const Eigen::Index> word) {
  check_word(env, word);
  const Eigen::Index d = env.dim();
  CMatrix m = CMatrix::Identity(d, d);
  if (word.empty()) return m;
  const std::vector<KrausSet> chain =
      orbit_chain(env, omega, static_cast<long long>(word.size()));
  // Nested adjoints: innermost factor is the last letter.
  for (std::size_t k = word.size(); k-- > 0;) {
    m = apply_T_adjoint(chain[k], word[k], m);
  }
  return m;
}

double shift_identity_residual(const EnvSystem& env, const EnvPoint& omega,
                               long long n, std::span<const Eigen::Index> word,
                               std::int64_t budget) {
  check_word(env, word);
  if (n < 0) throw std::invalid_argument("shift_identity_residual: n >= 0");
  const Eigen::Index n_labels =
      static_cast<Eigen::Index>(env.alphabet().size());
  double combos = 1.0;
  for (long long i = 0; i < n; ++i) combos *= static_cast<double>(n_labels);
  if (combos > static_cast<double>(budget)) {
    throw std::invalid_argument(
        "shift_identity_residual: enumeration budget exceeded");
  }

  // Left side: enumerate the disjoint prefix cylinders of sigma^{-n}(E).
  const Eigen::Index d = env.dim();
  CMatrix lhs = CMatrix::Zero(d, d);
  std::vector<Eigen::Index> full(static_cast<std::size_t>(n) + word.size());
  std::copy(word.begin(), word.end(),
            full.begin() + static_cast<std::ptrdiff_t>(n));
  const auto total = static_cast<std::int64_t>(combos);
  for (std::int64_t c = 0; c < total; ++c) {
    std::int64_t rem = c;
    for (long long i = 0; i < n; ++i) {
      full[static_cast<std::size_t>(i)] =
          static_cast<Eigen::Index>(rem % n_labels);
      rem /= n_labels;
    }
    lhs += matrix_measure_cylinder(env, omega, full);
  }

  // Right side: adjoint of the n-step composed channel applied to the
  // measure evaluated n steps downstream.
  CMatrix rhs =
      matrix_measure_cylinder(env, env.step_n(omega, n), word);
  const std::vector<KrausSet> chain = orbit_chain(env, omega, n);
  for (std::size_t k = chain.size(); k-- > 0;) {
    rhs = apply_channel_adjoint(chain[k], rhs);
  }
  return trace_norm(lhs - rhs);
}

AnnealedEstimate annealed_cylinder(const EnvSystem& env,
                                   const StateAssignment& theta,
                                   const CylinderSet& cyl, IntegrationMode mode,
                                   std::int64_t mc_samples, std::uint64_t seed,
                                   int threads) {
  check_word(env, cyl.word);
  if (cyl.start < 1) {
    throw std::invalid_argument("cylinder: start must be >= 1");
  }

  AnnealedEstimate est;
  if (mode == IntegrationMode::kExact) {
    est.exact = true;
    switch (env.kind()) {
      case EnvKind::kConstant: {
        const EnvPoint p = env.origin();
        est.value = quenched_cylinder_at(env, p, theta.at(env, p), cyl);
        return est;
      }
      case EnvKind::kPeriodic: {
        const int k = env.symbol_count();
        double acc = 0.0;
        for (int phase = 0; phase < k; ++phase) {
          EnvPoint p = env.origin();
          p.index = phase;
          acc += quenched_cylinder_at(env, p, theta.at(env, p), cyl);
        }
        est.value = acc / static_cast<double>(k);
        return est;
      }
      case EnvKind::kIid:
      case EnvKind::kMarkov: {
        if (!theta.constant_in_env()) {
          throw std::invalid_argument(
              "annealed: exact integration over a sequence environment needs "
              "an omega-independent initial state");
        }
        const QuantumState state = theta.at(env, env.origin());
        const SymbolModel model = symbol_model(env);
        const int s_count = env.symbol_count();
        const long long len =
            cyl.start - 1 + static_cast<long long>(cyl.word.size());
        const Eigen::Index d = env.dim();
        // Backward transfer recursion over the env coordinates the cylinder
        // reads: D_j(s) is the conditional expectation of the nested adjoint
        // image from position j on, given symbol s there. Positions past the
        // free prefix contribute T^dag of the word letter, earlier positions
        // the full adjoint channel.
        std::vector<CMatrix> next(static_cast<std::size_t>(s_count),
                                  CMatrix::Identity(d, d));
        for (long long j = len; j >= 1; --j) {
          std::vector<CMatrix> cur(static_cast<std::size_t>(s_count));
          for (int s = 0; s < s_count; ++s) {
            CMatrix mixed = CMatrix::Zero(d, d);
            if (j == len) {
              mixed = CMatrix::Identity(d, d);
            } else {
              for (int t = 0; t < s_count; ++t) {
                const double w = model.kernel(s, t);
                if (w > 0.0) mixed += w * next[static_cast<std::size_t>(t)];
              }
            }
            const KrausSet& fiber = env.fibers()[static_cast<std::size_t>(s)];
            if (j >= cyl.start) {
              cur[static_cast<std::size_t>(s)] = apply_T_adjoint(
                  fiber, cyl.word[static_cast<std::size_t>(j - cyl.start)],
                  mixed);
            } else {
              cur[static_cast<std::size_t>(s)] =
                  apply_channel_adjoint(fiber, mixed);
            }
          }
          next = std::move(cur);
        }
        double total = 0.0;
        for (int s = 0; s < s_count; ++s) {
          total += model.initial[static_cast<std::size_t>(s)] *
                   hs_inner(state.mat(), next[static_cast<std::size_t>(s)])
                       .real();
        }
        est.value = total;
        return est;
      }
      case EnvKind::kQuasiperiodic:
        throw std::invalid_argument("annealed: quadrature unavailable; use mc");
    }
    throw std::logic_error("annealed_cylinder: unreachable");
  }

  if (mc_samples < 1) {
    throw std::invalid_argument("annealed mc: needs at least one sample");
  }
  std::vector<double> values(static_cast<std::size_t>(mc_samples), 0.0);
  parallel_for_index(mc_samples, threads, [&](std::int64_t i) {
    RngStream stream(
        derive_seed(seed, static_cast<std::uint64_t>(i), /*tag=*/0xA11));
    const EnvPoint p = env.sample_invariant(stream);
    values[static_cast<std::size_t>(i)] =
        quenched_cylinder_at(env, p, theta.at(env, p), cyl);
  });
  const SampleStats stats = sample_stats(values);
  est.value = stats.mean;
  est.std_error = stats.std_error;
  est.exact = false;
  est.samples = mc_samples;
  return est;
}

}  // namespace dqt
