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

#include "dqt/ergodics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

#include "dqt/parallel.hpp"
#include "dqt/stats.hpp"

namespace dqt {

namespace {

EnvPoint own_cache(EnvPoint p) {
  if (p.cache) p.cache = std::make_shared<SymbolSequenceCache>(*p.cache);
  return p;
}

CMatrix unvec(const Eigen::VectorXcd& v, Eigen::Index d) {
  return Eigen::Map<const CMatrix>(v.data(), d, d);
}

struct CoreResult {
  CMatrix average;
  long long iterations = 0;
  bool converged = false;
};

// Cesaro limit of the backward-orbit pushforwards psi_n of the seed state.
// Each step adds a channel on the *inner* end of the composition, so the
// composed map is carried as its d^2 x d^2 matrix and extended by a single
// right-multiplication per step. Averages are compared over doubling windows
// (b/2, b], b = 8, 16, ...: a window average shares the limit of the plain
// running average and sheds the O(1/N) tail that the latter drags along.
CoreResult cesaro_core(const EnvSystem& env, const EnvPoint& omega,
                       const CMatrix& seed, long long n_max, double tol) {
  const Eigen::Index d = env.dim();
  CoreResult out;
  CMatrix composed = CMatrix::Identity(d * d, d * d);
  const Eigen::Map<const Eigen::VectorXcd> seed_vec(seed.data(), seed.size());

  EnvPoint back = own_cache(omega);
  Eigen::VectorXcd cum = Eigen::VectorXcd::Zero(d * d);
  Eigen::VectorXcd prev_cum = cum;
  Eigen::VectorXcd window;
  bool have_window = false;
  long long prev_boundary = 0;
  long long boundary = 8;

  for (long long n = 1; n <= n_max; ++n) {
    composed = composed * channel_of(env.ensemble_at(back)).rep();
    back = env.step_back(back);
    cum += composed * seed_vec;
    out.iterations = n;
    if (n != boundary) continue;

    Eigen::VectorXcd next_window =
        (cum - prev_cum) / static_cast<double>(n - prev_boundary);
    if (have_window &&
        trace_norm(unvec(next_window, d) - unvec(window, d)) < tol) {
      window = std::move(next_window);
      out.converged = true;
      break;
    }
    window = std::move(next_window);
    have_window = true;
    prev_cum = cum;
    prev_boundary = n;
    boundary *= 2;
  }

  out.average = have_window || out.converged
                    ? unvec(window, d)
                    : unvec(Eigen::VectorXcd(
                                cum / static_cast<double>(out.iterations)),
                            d);
  return out;
}

QuantumState ginibre_state(Eigen::Index d, RngStream& rng) {
  CMatrix g(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      g(r, c) = Complex(rng.next_gaussian(), rng.next_gaussian()) *
                0.7071067811865476;
    }
  }
  CMatrix rho = g * g.adjoint();
  return psd_repair(rho / rho.trace().real());
}

double guarded_z(double diff, double variance) {
  const double denom = std::sqrt(variance);
  if (denom == 0.0) {
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return diff / denom;
}

struct EmpiricalFrequency {
  SampleStats stats;
  std::vector<double> per_trajectory;
};

// Sliding-window frequency of `pattern` over opts.steps window starts per
// trajectory. Trajectories run opts.steps + |pattern| - 1 measurement steps
// so every window is complete.
EmpiricalFrequency empirical_pattern_frequency(
    const EnvSystem& env, std::span<const Eigen::Index> pattern,
    const StateAssignment& theta, const LLNOptions& opts) {
  if (pattern.empty()) {
    throw std::invalid_argument("lln: pattern must be non-empty");
  }
  if (opts.steps < 1) {
    throw std::invalid_argument("lln: steps must be >= 1");
  }
  if (opts.trajectories < 2) {
    throw std::invalid_argument("lln: needs at least two trajectories");
  }
  const std::size_t m = pattern.size();

  BatchOptions batch;
  batch.omega_mode = opts.omega_mode;
  batch.fixed_omega = opts.fixed_omega;
  batch.threads = opts.threads;
  const std::vector<TrajectoryRecord> records =
      sample_batch(env, theta, opts.steps + static_cast<long long>(m) - 1,
                   opts.trajectories, opts.seed, batch);

  EmpiricalFrequency out;
  out.per_trajectory.resize(records.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::vector<Eigen::Index>& o = records[i].outcomes;
    long long hits = 0;
    for (long long n = 0; n < opts.steps; ++n) {
      bool match = true;
      for (std::size_t j = 0; j < m; ++j) {
        if (o[static_cast<std::size_t>(n) + j] != pattern[j]) {
          match = false;
          break;
        }
      }
      if (match) ++hits;
    }
    out.per_trajectory[i] =
        static_cast<double>(hits) / static_cast<double>(opts.steps);
  }
  out.stats = sample_stats(out.per_trajectory);
  return out;
}

// Exact conditional mean of the sliding-window frequency given omega:
// (1/N) sum_{n=1..N} of the quenched probability of `pattern` at positions
// n..n+m-1. The state evolves through one full channel per window shift.
double exact_window_mean(const EnvSystem& env, const EnvPoint& omega,
                         const QuantumState& theta,
                         std::span<const Eigen::Index> pattern, long long n) {
  const std::size_t m = pattern.size();
  EnvPoint ahead = own_cache(omega);
  std::vector<KrausSet> window;
  window.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    ahead = env.step(ahead);
    window.push_back(env.ensemble_at(ahead));
  }
  CMatrix rho = theta.mat();
  double acc = 0.0;
  for (long long i = 1; i <= n; ++i) {
    CMatrix v = window[0].ops[static_cast<std::size_t>(pattern[0])];
    for (std::size_t j = 1; j < m; ++j) {
      v = window[j].ops[static_cast<std::size_t>(pattern[j])] * v;
    }
    acc += (v * rho * v.adjoint()).trace().real();
    if (i == n) break;
    rho = apply_channel(window[0], rho);
    ahead = env.step(ahead);
    std::rotate(window.begin(), window.begin() + 1, window.end());
    window.back() = env.ensemble_at(ahead);
  }
  return acc / static_cast<double>(n);
}

AnnealedEstimate stationary_cylinder_target(const EnvSystem& env,
                                            const CylinderSet& cyl,
                                            const StationaryOptions& solver,
                                            std::int64_t mc_samples,
                                            std::uint64_t seed, int threads) {
  const StationaryAssignment stat(solver);
  const bool exact_ok =
      env.kind() == EnvKind::kConstant || env.kind() == EnvKind::kPeriodic;
  return annealed_cylinder(
      env, stat, cyl,
      exact_ok ? IntegrationMode::kExact : IntegrationMode::kMonteCarlo,
      mc_samples, seed, threads);
}

// kernel(s, t) = P(symbol t follows symbol s) for the sequence environments.
Eigen::MatrixXd symbol_kernel(const EnvSystem& env) {
  const int k = env.symbol_count();
  if (env.kind() == EnvKind::kMarkov) return env.transition();
  Eigen::MatrixXd kernel(k, k);
  for (int s = 0; s < k; ++s) {
    for (int t = 0; t < k; ++t) kernel(s, t) = env.weights()[static_cast<std::size_t>(t)];
  }
  return kernel;
}

const std::vector<double>& symbol_initial(const EnvSystem& env) {
  return env.kind() == EnvKind::kMarkov ? env.stationary() : env.weights();
}

}  // namespace

StationaryResult stationary_state(const EnvSystem& env, const EnvPoint& omega,
                                  const QuantumState& seed_state,
                                  const StationaryOptions& opts) {
  if (opts.n_max < 8) {
    throw std::invalid_argument("stationary_state: n_max must be >= 8");
  }
  if (seed_state.dim() != env.dim()) {
    throw std::invalid_argument("stationary_state: dimension mismatch");
  }
  const CoreResult here =
      cesaro_core(env, omega, seed_state.mat(), opts.n_max, opts.tol);

  // Stationarity defect needs the profile one step downstream as well.
  const EnvPoint next = env.step(own_cache(omega));
  const CoreResult there =
      cesaro_core(env, next, seed_state.mat(), opts.n_max, opts.tol);

  StationaryResult result{psd_repair(here.average), 0.0, here.iterations,
                          here.converged && there.converged};
  const QuantumState rho_next = psd_repair(there.average);
  result.residual = trace_norm(
      apply_channel(env.ensemble_at(next), result.state.mat()) -
      rho_next.mat());
  return result;
}

QuantumState StationaryAssignment::at(const EnvSystem& env,
                                      const EnvPoint& omega) const {
  return stationary_state(env, omega, QuantumState::maximally_mixed(env.dim()),
                          opts_)
      .state;
}

CertifyReport dyn_erg_certify(const EnvSystem& env,
                              const CertifyOptions& opts) {
  if (opts.anchors < 1 || opts.seed_states < 2) {
    throw std::invalid_argument(
        "dyn_erg_certify: needs >= 1 anchor and >= 2 seed states");
  }
  const Eigen::Index d = env.dim();

  // Basis pure states first (they separate reducible dynamics hard), then
  // Ginibre-random density matrices.
  std::vector<QuantumState> seeds;
  seeds.reserve(static_cast<std::size_t>(opts.seed_states));
  const int basis_count =
      std::min<int>(opts.seed_states, static_cast<int>(d));
  for (int k = 0; k < basis_count; ++k) {
    seeds.push_back(QuantumState::pure_basis(d, k));
  }
  RngStream grng(derive_seed(opts.seed, 0, /*tag=*/0x61));
  while (static_cast<int>(seeds.size()) < opts.seed_states) {
    seeds.push_back(ginibre_state(d, grng));
  }

  RngStream arng(derive_seed(opts.seed, 0, /*tag=*/0xA7));
  CertifyReport report;
  bool all_converged = true;
  for (int a = 0; a < opts.anchors; ++a) {
    const EnvPoint omega = env.sample_invariant(arng);
    CertifyAnchor anchor;
    std::vector<StationaryResult> sols;
    sols.reserve(seeds.size());
    for (const QuantumState& s : seeds) {
      sols.push_back(stationary_state(env, omega, s, opts.solver));
      anchor.max_residual = std::max(anchor.max_residual,
                                     sols.back().residual);
      anchor.all_converged = anchor.all_converged && sols.back().converged;
    }
    for (std::size_t i = 0; i < sols.size(); ++i) {
      for (std::size_t j = i + 1; j < sols.size(); ++j) {
        anchor.max_pair_distance =
            std::max(anchor.max_pair_distance,
                     trace_norm(sols[i].state.mat() - sols[j].state.mat()));
      }
    }
    report.max_pair_distance =
        std::max(report.max_pair_distance, anchor.max_pair_distance);
    report.max_residual = std::max(report.max_residual, anchor.max_residual);
    all_converged = all_converged && anchor.all_converged;
    report.anchors.push_back(anchor);
  }
  const double gate = 10.0 * opts.solver.tol;
  report.pass = all_converged && report.max_pair_distance <= gate &&
                report.max_residual <= gate;
  return report;
}

LLNReport verify_lln_outcomes(const EnvSystem& env,
                              std::span<const Eigen::Index> pattern,
                              const StateAssignment& theta,
                              const LLNOptions& opts) {
  const EmpiricalFrequency emp =
      empirical_pattern_frequency(env, pattern, theta, opts);

  CylinderSet cyl;
  cyl.start = 1;
  cyl.word.assign(pattern.begin(), pattern.end());
  const AnnealedEstimate target = stationary_cylinder_target(
      env, cyl, opts.solver, opts.target_mc_samples,
      derive_seed(opts.seed, 0, /*tag=*/0x7A6), opts.threads);

  LLNReport report;
  report.pattern = cyl.word;
  report.empirical_mean = emp.stats.mean;
  report.empirical_std_error = emp.stats.std_error;
  report.target = target.value;
  report.target_std_error = target.std_error;
  report.target_exact = target.exact;
  report.trajectories = opts.trajectories;
  report.steps = opts.steps;
  report.per_trajectory = emp.per_trajectory;
  report.z_score = guarded_z(
      emp.stats.mean - target.value,
      emp.stats.std_error * emp.stats.std_error +
          target.std_error * target.std_error);
  return report;
}

bool EnvEvent::contains(int symbol) const {
  if (all) return true;
  return std::find(symbols.begin(), symbols.end(), symbol) != symbols.end();
}

AnnealedLLNReport verify_annealed_lln(const EnvSystem& env,
                                      const StateAssignment& theta,
                                      const EnvEvent& f_event,
                                      std::span<const Eigen::Index> e_word,
                                      const AnnealedLLNOptions& opts) {
  if (!env.finite_symbols()) {
    throw std::invalid_argument(
        "annealed lln: exact terms need a finite-symbol environment");
  }
  if (opts.n_max < 1) {
    throw std::invalid_argument("annealed lln: n_max must be >= 1");
  }
  const Eigen::Index d = env.dim();
  const long long n_max = opts.n_max;
  const StationaryAssignment stat(opts.solver);

  AnnealedLLNReport report;

  // Target: the annealed probability of F x E at the stationary profile.
  switch (env.kind()) {
    case EnvKind::kConstant: {
      const EnvPoint p = env.origin();
      const double ind = f_event.contains(0) ? 1.0 : 0.0;
      report.target =
          ind * hs_inner(stat.at(env, p).mat(),
                         matrix_measure_cylinder(env, p, e_word))
                    .real();
      report.target_exact = true;
      break;
    }
    case EnvKind::kPeriodic: {
      const int k_count = env.symbol_count();
      double acc = 0.0;
      for (int k = 0; k < k_count; ++k) {
        if (!f_event.contains(k)) continue;
        EnvPoint p = env.origin();
        p.index = k;
        acc += hs_inner(stat.at(env, p).mat(),
                        matrix_measure_cylinder(env, p, e_word))
                   .real();
      }
      report.target = acc / static_cast<double>(k_count);
      report.target_exact = true;
      break;
    }
    case EnvKind::kIid:
    case EnvKind::kMarkov: {
      if (opts.target_mc_samples < 2) {
        throw std::invalid_argument(
            "annealed lln: needs >= 2 target samples");
      }
      std::vector<double> vals(
          static_cast<std::size_t>(opts.target_mc_samples), 0.0);
      parallel_for_index(opts.target_mc_samples, 1, [&](std::int64_t i) {
        RngStream stream(derive_seed(opts.seed, static_cast<std::uint64_t>(i),
                                     /*tag=*/0xA22));
        const EnvPoint p = env.sample_invariant(stream);
        if (!f_event.contains(env.symbol_at(p))) return;
        vals[static_cast<std::size_t>(i)] =
            hs_inner(stat.at(env, p).mat(),
                     matrix_measure_cylinder(env, p, e_word))
                .real();
      });
      const SampleStats stats = sample_stats(vals);
      report.target = stats.mean;
      report.target_std_error = stats.std_error;
      report.target_exact = false;
      break;
    }
    case EnvKind::kQuasiperiodic:
      throw std::logic_error("verify_annealed_lln: unreachable");
  }

  // Exact terms q_n = annealed probability of tau^{-n}(F x E), computed by
  // pulling the matrix measure of E back through adjoint channels while
  // conditioning on the symbol read at each environment coordinate.
  std::vector<double> terms(static_cast<std::size_t>(n_max), 0.0);
  switch (env.kind()) {
    case EnvKind::kConstant: {
      const EnvPoint p = env.origin();
      const double ind = f_event.contains(0) ? 1.0 : 0.0;
      const CMatrix theta_mat = theta.at(env, p).mat();
      const KrausSet& fiber = env.fibers()[0];
      CMatrix r = matrix_measure_cylinder(env, p, e_word);
      for (long long n = 1; n <= n_max; ++n) {
        r = apply_channel_adjoint(fiber, r);
        terms[static_cast<std::size_t>(n - 1)] =
            ind * hs_inner(theta_mat, r).real();
      }
      break;
    }
    case EnvKind::kPeriodic: {
      const int k_count = env.symbol_count();
      std::vector<CMatrix> r(static_cast<std::size_t>(k_count));
      std::vector<CMatrix> theta_k(static_cast<std::size_t>(k_count));
      for (int k = 0; k < k_count; ++k) {
        EnvPoint p = env.origin();
        p.index = k;
        r[static_cast<std::size_t>(k)] =
            matrix_measure_cylinder(env, p, e_word);
        theta_k[static_cast<std::size_t>(k)] = theta.at(env, p).mat();
      }
      for (long long n = 1; n <= n_max; ++n) {
        std::vector<CMatrix> next(static_cast<std::size_t>(k_count));
        for (int k = 0; k < k_count; ++k) {
          const int fwd = (k + 1) % k_count;
          next[static_cast<std::size_t>(k)] = apply_channel_adjoint(
              env.fibers()[static_cast<std::size_t>(fwd)],
              r[static_cast<std::size_t>(fwd)]);
        }
        r = std::move(next);
        double acc = 0.0;
        for (int k = 0; k < k_count; ++k) {
          if (!f_event.contains(static_cast<int>((k + n) % k_count))) continue;
          acc += hs_inner(theta_k[static_cast<std::size_t>(k)],
                          r[static_cast<std::size_t>(k)])
                     .real();
        }
        terms[static_cast<std::size_t>(n - 1)] =
            acc / static_cast<double>(k_count);
      }
      break;
    }
    case EnvKind::kIid:
    case EnvKind::kMarkov: {
      if (!theta.constant_in_env()) {
        throw std::invalid_argument(
            "annealed lln: exact terms over a sequence environment need an "
            "omega-independent initial state");
      }
      const CMatrix theta_mat = theta.at(env, env.origin()).mat();
      const int s_count = env.symbol_count();
      const Eigen::MatrixXd kernel = symbol_kernel(env);
      const std::vector<double>& mu1 = symbol_initial(env);

      // w[s]: conditional expectation of the matrix measure of E given the
      // symbol at the first coordinate the word reads.
      std::vector<CMatrix> w(static_cast<std::size_t>(s_count),
                             CMatrix::Identity(d, d));
      for (std::size_t j = e_word.size(); j-- > 0;) {
        std::vector<CMatrix> cur(static_cast<std::size_t>(s_count));
        for (int s = 0; s < s_count; ++s) {
          CMatrix mixed = CMatrix::Zero(d, d);
          if (j + 1 == e_word.size()) {
            mixed = CMatrix::Identity(d, d);
          } else {
            for (int t = 0; t < s_count; ++t) {
              const double p = kernel(s, t);
              if (p > 0.0) mixed += p * w[static_cast<std::size_t>(t)];
            }
          }
          cur[static_cast<std::size_t>(s)] = apply_T_adjoint(
              env.fibers()[static_cast<std::size_t>(s)], e_word[j], mixed);
        }
        w = std::move(cur);
      }

      // c[s]: conditional expectation, given the symbol s at the coordinate
      // k channels upstream of the event, of the indicator times the nested
      // adjoint image.
      std::vector<CMatrix> c(static_cast<std::size_t>(s_count));
      for (int s = 0; s < s_count; ++s) {
        CMatrix g = CMatrix::Identity(d, d);
        if (!e_word.empty()) {
          g = CMatrix::Zero(d, d);
          for (int t = 0; t < s_count; ++t) {
            const double p = kernel(s, t);
            if (p > 0.0) g += p * w[static_cast<std::size_t>(t)];
          }
        }
        const double ind = f_event.contains(s) ? 1.0 : 0.0;
        c[static_cast<std::size_t>(s)] =
            ind * apply_channel_adjoint(
                      env.fibers()[static_cast<std::size_t>(s)], g);
      }
      for (long long n = 1; n <= n_max; ++n) {
        if (n > 1) {
          std::vector<CMatrix> next(static_cast<std::size_t>(s_count));
          for (int s = 0; s < s_count; ++s) {
            CMatrix mixed = CMatrix::Zero(d, d);
            for (int t = 0; t < s_count; ++t) {
              const double p = kernel(s, t);
              if (p > 0.0) mixed += p * c[static_cast<std::size_t>(t)];
            }
            next[static_cast<std::size_t>(s)] = apply_channel_adjoint(
                env.fibers()[static_cast<std::size_t>(s)], mixed);
          }
          c = std::move(next);
        }
        double q = 0.0;
        for (int s = 0; s < s_count; ++s) {
          q += mu1[static_cast<std::size_t>(s)] *
               hs_inner(theta_mat, c[static_cast<std::size_t>(s)]).real();
        }
        terms[static_cast<std::size_t>(n - 1)] = q;
      }
      break;
    }
    case EnvKind::kQuasiperiodic:
      throw std::logic_error("verify_annealed_lln: unreachable");
  }

  std::vector<long long> checkpoints = opts.checkpoints;
  if (checkpoints.empty()) {
    for (long long n = 1; n < n_max; n *= 2) checkpoints.push_back(n);
    checkpoints.push_back(n_max);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  if (checkpoints.front() < 1 || checkpoints.back() > n_max) {
    throw std::invalid_argument("annealed lln: checkpoint out of range");
  }

  double cum = 0.0;
  std::size_t next_cp = 0;
  for (long long n = 1; n <= n_max; ++n) {
    const double q = terms[static_cast<std::size_t>(n - 1)];
    cum += q;
    report.max_term_gap =
        std::max(report.max_term_gap, std::abs(q - report.target));
    if (next_cp < checkpoints.size() && checkpoints[next_cp] == n) {
      AnnealedLLNRow row;
      row.n = n;
      row.cesaro = cum / static_cast<double>(n);
      row.gap = std::abs(row.cesaro - report.target);
      report.checkpoints.push_back(row);
      ++next_cp;
    }
  }
  return report;
}

QuenchedErgReport verify_quenched_ergodic(const EnvSystem& env,
                                          std::span<const Eigen::Index> pattern,
                                          const QuenchedErgOptions& opts) {
  if (opts.omega_samples < 1) {
    throw std::invalid_argument("quenched erg: needs >= 1 omega sample");
  }
  const Eigen::Index d = env.dim();
  std::vector<std::shared_ptr<const StateAssignment>> thetas = opts.thetas;
  if (thetas.empty()) {
    thetas.push_back(
        std::make_shared<FixedState>(QuantumState::maximally_mixed(d)));
    thetas.push_back(
        std::make_shared<FixedState>(QuantumState::pure_basis(d, 0)));
  }

  RngStream orng(derive_seed(opts.lln.seed, 0, /*tag=*/0x0E6));
  std::vector<EnvPoint> omegas;
  omegas.reserve(static_cast<std::size_t>(opts.omega_samples));
  for (int i = 0; i < opts.omega_samples; ++i) {
    omegas.push_back(env.sample_invariant(orng));
  }

  // One shared target; every cell's average must be compatible with it and
  // with every other cell.
  CylinderSet cyl;
  cyl.start = 1;
  cyl.word.assign(pattern.begin(), pattern.end());
  const AnnealedEstimate target = stationary_cylinder_target(
      env, cyl, opts.lln.solver, opts.lln.target_mc_samples,
      derive_seed(opts.lln.seed, 0, /*tag=*/0x7A6), opts.lln.threads);

  QuenchedErgReport report;

  // Exact conditional window means over independent invariant draws: their
  // per-theta spread estimates the finite-time disorder offset, and the
  // per-draw differences between thetas estimate the same-omega transient.
  const std::size_t n_thetas = thetas.size();
  const auto draws =
      static_cast<std::size_t>(std::max<std::int64_t>(
          opts.lln.target_mc_samples, 8));
  std::vector<std::vector<double>> mu(
      n_thetas, std::vector<double>(draws, 0.0));
  for (std::size_t k = 0; k < draws; ++k) {
    RngStream stream(derive_seed(opts.lln.seed,
                                 static_cast<std::uint64_t>(k),
                                 /*tag=*/0xD5));
    const EnvPoint w = env.sample_invariant(stream);
    for (std::size_t t = 0; t < n_thetas; ++t) {
      mu[t][k] = exact_window_mean(env, w, thetas[t]->at(env, w), pattern,
                                   opts.lln.steps);
    }
  }
  auto variance_of = [](const std::vector<double>& xs) {
    const SampleStats s = sample_stats(xs);
    return s.stddev * s.stddev;
  };
  report.disorder_variance.resize(n_thetas, 0.0);
  for (std::size_t t = 0; t < n_thetas; ++t) {
    report.disorder_variance[t] = variance_of(mu[t]);
  }
  std::vector<std::vector<double>> theta_gap_variance(
      n_thetas, std::vector<double>(n_thetas, 0.0));
  for (std::size_t a = 0; a < n_thetas; ++a) {
    for (std::size_t b = a + 1; b < n_thetas; ++b) {
      std::vector<double> gaps(draws, 0.0);
      for (std::size_t k = 0; k < draws; ++k) gaps[k] = mu[a][k] - mu[b][k];
      theta_gap_variance[a][b] = theta_gap_variance[b][a] =
          variance_of(gaps);
    }
  }

  int cell_index = 0;
  for (int oi = 0; oi < opts.omega_samples; ++oi) {
    for (int ti = 0; ti < static_cast<int>(n_thetas); ++ti) {
      LLNOptions cell_opts = opts.lln;
      cell_opts.omega_mode = OmegaMode::kFixed;
      cell_opts.fixed_omega = omegas[static_cast<std::size_t>(oi)];
      cell_opts.seed = derive_seed(
          opts.lln.seed, static_cast<std::uint64_t>(cell_index), /*tag=*/0x9E);
      const StateAssignment& theta = *thetas[static_cast<std::size_t>(ti)];
      const EmpiricalFrequency emp =
          empirical_pattern_frequency(env, pattern, theta, cell_opts);

      QuenchedErgCell cell;
      cell.omega_index = oi;
      cell.theta_index = ti;
      cell.report.pattern = cyl.word;
      cell.report.empirical_mean = emp.stats.mean;
      cell.report.empirical_std_error = emp.stats.std_error;
      cell.report.target = target.value;
      cell.report.target_std_error = target.std_error;
      cell.report.target_exact = target.exact;
      cell.report.trajectories = cell_opts.trajectories;
      cell.report.steps = cell_opts.steps;
      const EnvPoint& w = omegas[static_cast<std::size_t>(oi)];
      cell.exact_conditional_mean =
          exact_window_mean(env, w, theta.at(env, w), pattern,
                            cell_opts.steps);
      cell.z_vs_conditional = guarded_z(
          emp.stats.mean - cell.exact_conditional_mean,
          emp.stats.std_error * emp.stats.std_error);
      cell.report.z_score = guarded_z(
          emp.stats.mean - target.value,
          emp.stats.std_error * emp.stats.std_error +
              report.disorder_variance[static_cast<std::size_t>(ti)] +
              target.std_error * target.std_error);
      report.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }

  const std::size_t cells = report.cells.size();
  const std::size_t comparisons = cells * (cells - 1) / 2 + 2 * cells;
  report.z_threshold_used = z_threshold(comparisons);
  for (std::size_t i = 0; i < cells; ++i) {
    const QuenchedErgCell& a = report.cells[i];
    report.max_target_z =
        std::max(report.max_target_z, std::abs(a.report.z_score));
    report.max_conditional_z =
        std::max(report.max_conditional_z, std::abs(a.z_vs_conditional));
    for (std::size_t j = i + 1; j < cells; ++j) {
      const QuenchedErgCell& b = report.cells[j];
      const auto ta = static_cast<std::size_t>(a.theta_index);
      const auto tb = static_cast<std::size_t>(b.theta_index);
      const double extra =
          a.omega_index == b.omega_index
              ? theta_gap_variance[ta][tb]
              : report.disorder_variance[ta] + report.disorder_variance[tb];
      const double z = guarded_z(
          a.report.empirical_mean - b.report.empirical_mean,
          a.report.empirical_std_error * a.report.empirical_std_error +
              b.report.empirical_std_error * b.report.empirical_std_error +
              extra);
      report.max_pair_z = std::max(report.max_pair_z, std::abs(z));
    }
  }
  report.pass = report.max_pair_z <= report.z_threshold_used &&
                report.max_target_z <= report.z_threshold_used &&
                report.max_conditional_z <= report.z_threshold_used;
  return report;
}

}  // namespace dqt
