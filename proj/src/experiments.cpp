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

#include "dqt/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "dqt/measures.hpp"
#include "dqt/stats.hpp"
#include "dqt/trajectory.hpp"

namespace dqt {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_hex(std::uint64_t x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(x));
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("run: cannot write " + path.string());
  }
  out << body;
}

std::string join_word(const EnvSystem& env,
                      std::span<const Eigen::Index> word) {
  std::string s;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) s += '.';
    s += env.alphabet()[static_cast<std::size_t>(word[i])];
  }
  return s;
}

struct RunContext {
  const ExperimentConfig& cfg;
  const EnvSystem& env;
  std::uint64_t seed;
  int threads;
  std::filesystem::path out_dir;
};

StationaryOptions solver_options(const RunContext& ctx) {
  StationaryOptions opts;
  opts.n_max = ctx.cfg.params.solver_n_max;
  opts.tol = ctx.cfg.params.solver_tol.value_or(default_solver_tol(ctx.env));
  return opts;
}

LLNOptions lln_options(const RunContext& ctx) {
  LLNOptions opts;
  opts.trajectories = ctx.cfg.params.trajectories;
  opts.steps = ctx.cfg.params.steps;
  opts.seed = ctx.seed;
  opts.omega_mode = OmegaMode::kResampleInvariant;
  opts.threads = ctx.threads;
  opts.target_mc_samples = ctx.cfg.params.mc_samples;
  opts.solver = solver_options(ctx);
  return opts;
}

bool run_validate(const RunContext& ctx) {
  std::ostringstream csv;
  csv << "fiber,residual,pass\n";
  bool all = true;
  for (std::size_t i = 0; i < ctx.env.fibers().size(); ++i) {
    const KrausValidation v = kraus_validate(ctx.env.fibers()[i]);
    all = all && v.pass;
    csv << i << ',' << fmt(v.residual) << ',' << (v.pass ? 1 : 0) << '\n';
  }
  write_text(ctx.out_dir / "validate.csv", csv.str());
  return all;
}

bool run_simulate(const RunContext& ctx) {
  BatchOptions batch;
  batch.omega_mode = OmegaMode::kResampleInvariant;
  batch.threads = ctx.threads;
  const std::vector<TrajectoryRecord> records =
      sample_batch(ctx.env, *ctx.cfg.initial_state, ctx.cfg.params.steps,
                   ctx.cfg.params.trajectories, ctx.seed, batch);

  std::ostringstream csv;
  csv << "trajectory,step,outcome,label,step_prob\n";
  for (std::size_t t = 0; t < records.size(); ++t) {
    const TrajectoryRecord& r = records[t];
    for (std::size_t n = 0; n < r.outcomes.size(); ++n) {
      const auto a = static_cast<std::size_t>(r.outcomes[n]);
      csv << t << ',' << (n + 1) << ',' << r.outcomes[n] << ','
          << ctx.env.alphabet()[a] << ',' << fmt(r.step_probs[n]) << '\n';
    }
  }
  write_text(ctx.out_dir / "trajectories.csv", csv.str());
  return true;
}

bool run_stationary(const RunContext& ctx) {
  const EnvPoint omega = ctx.env.origin(ctx.seed);
  const QuantumState seed_state =
      ctx.cfg.initial_is_stationary
          ? QuantumState::maximally_mixed(ctx.env.dim())
          : ctx.cfg.initial_state->at(ctx.env, omega);
  const StationaryOptions solver = solver_options(ctx);
  const StationaryResult res =
      stationary_state(ctx.env, omega, seed_state, solver);

  std::ostringstream state_csv;
  state_csv << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < res.state.dim(); ++r) {
    for (Eigen::Index c = 0; c < res.state.dim(); ++c) {
      state_csv << r << ',' << c << ',' << fmt(res.state.mat()(r, c).real())
                << ',' << fmt(res.state.mat()(r, c).imag()) << '\n';
    }
  }
  write_text(ctx.out_dir / "stationary_state.csv", state_csv.str());

  std::ostringstream summary;
  summary << "residual,iterations,converged,tol\n"
          << fmt(res.residual) << ',' << res.iterations << ','
          << (res.converged ? 1 : 0) << ',' << fmt(solver.tol) << '\n';
  write_text(ctx.out_dir / "stationary_summary.csv", summary.str());
  return res.converged;
}

bool run_certify(const RunContext& ctx) {
  CertifyOptions opts;
  opts.anchors = ctx.cfg.params.anchors;
  opts.seed_states = ctx.cfg.params.seed_states;
  opts.solver = solver_options(ctx);
  opts.seed = ctx.seed;
  const CertifyReport report = dyn_erg_certify(ctx.env, opts);

  std::ostringstream csv;
  csv << "anchor,max_pair_distance,max_residual,all_converged\n";
  for (std::size_t a = 0; a < report.anchors.size(); ++a) {
    const CertifyAnchor& anchor = report.anchors[a];
    csv << a << ',' << fmt(anchor.max_pair_distance) << ','
        << fmt(anchor.max_residual) << ',' << (anchor.all_converged ? 1 : 0)
        << '\n';
  }
  write_text(ctx.out_dir / "certify.csv", csv.str());

  std::ostringstream summary;
  summary << "pass,max_pair_distance,max_residual,gate\n"
          << (report.pass ? 1 : 0) << ',' << fmt(report.max_pair_distance)
          << ',' << fmt(report.max_residual) << ','
          << fmt(10.0 * opts.solver.tol) << '\n';
  write_text(ctx.out_dir / "certify_summary.csv", summary.str());
  return report.pass;
}

bool run_lln(const RunContext& ctx) {
  if (ctx.cfg.params.pattern.empty()) {
    throw std::invalid_argument("lln: params.pattern required");
  }
  const LLNOptions opts = lln_options(ctx);
  const LLNReport report = verify_lln_outcomes(ctx.env, ctx.cfg.params.pattern,
                                               *ctx.cfg.initial_state, opts);
  const double threshold = z_threshold(1);
  const bool pass = std::abs(report.z_score) <= threshold;

  std::ostringstream csv;
  csv << "pattern,empirical_mean,empirical_se,target,target_se,target_exact,"
         "z,z_threshold,pass\n";
  csv << join_word(ctx.env, report.pattern) << ','
      << fmt(report.empirical_mean) << ',' << fmt(report.empirical_std_error)
      << ',' << fmt(report.target) << ',' << fmt(report.target_std_error)
      << ',' << (report.target_exact ? 1 : 0) << ',' << fmt(report.z_score)
      << ',' << fmt(threshold) << ',' << (pass ? 1 : 0) << '\n';
  write_text(ctx.out_dir / "lln.csv", csv.str());

  std::ostringstream plot;
  plot << "series,x,y,yerr\n";
  for (std::size_t i = 0; i < report.per_trajectory.size(); ++i) {
    plot << "frequency," << i << ',' << fmt(report.per_trajectory[i])
         << ",0\n";
  }
  plot << "target,0," << fmt(report.target) << ','
       << fmt(report.target_std_error) << '\n';
  write_text(ctx.out_dir / "plot.csv", plot.str());
  return pass;
}

bool run_annealed_lln(const RunContext& ctx) {
  AnnealedLLNOptions opts;
  opts.n_max = ctx.cfg.params.n_max;
  opts.target_mc_samples = ctx.cfg.params.mc_samples;
  opts.seed = ctx.seed;
  opts.solver = solver_options(ctx);
  const AnnealedLLNReport report =
      verify_annealed_lln(ctx.env, *ctx.cfg.initial_state,
                          ctx.cfg.params.env_event, ctx.cfg.params.word, opts);

  const double tol = ctx.cfg.params.tol.value_or(1e-3);
  const bool pass =
      !report.checkpoints.empty() && report.checkpoints.back().gap <= tol;

  std::ostringstream csv;
  csv << "n,cesaro,target,gap\n";
  std::ostringstream plot;
  plot << "series,x,y,yerr\n";
  for (const AnnealedLLNRow& row : report.checkpoints) {
    csv << row.n << ',' << fmt(row.cesaro) << ',' << fmt(report.target) << ','
        << fmt(row.gap) << '\n';
    plot << "cesaro," << row.n << ',' << fmt(row.cesaro) << ",0\n";
  }
  plot << "target," << report.checkpoints.back().n << ','
       << fmt(report.target) << ',' << fmt(report.target_std_error) << '\n';
  write_text(ctx.out_dir / "annealed_lln.csv", csv.str());
  write_text(ctx.out_dir / "plot.csv", plot.str());

  std::ostringstream summary;
  summary << "target,target_se,target_exact,max_term_gap,tol,pass\n"
          << fmt(report.target) << ',' << fmt(report.target_std_error) << ','
          << (report.target_exact ? 1 : 0) << ',' << fmt(report.max_term_gap)
          << ',' << fmt(tol) << ',' << (pass ? 1 : 0) << '\n';
  write_text(ctx.out_dir / "annealed_lln_summary.csv", summary.str());
  return pass;
}

bool run_quenched_erg(const RunContext& ctx) {
  if (ctx.cfg.params.pattern.empty()) {
    throw std::invalid_argument("quenched-erg: params.pattern required");
  }
  QuenchedErgOptions opts;
  opts.omega_samples = ctx.cfg.params.omega_samples;
  opts.lln = lln_options(ctx);
  const QuenchedErgReport report =
      verify_quenched_ergodic(ctx.env, ctx.cfg.params.pattern, opts);

  std::ostringstream csv;
  csv << "omega,theta,empirical_mean,empirical_se,conditional_mean,"
         "z_vs_conditional,z_vs_target\n";
  for (const QuenchedErgCell& cell : report.cells) {
    csv << cell.omega_index << ',' << cell.theta_index << ','
        << fmt(cell.report.empirical_mean) << ','
        << fmt(cell.report.empirical_std_error) << ','
        << fmt(cell.exact_conditional_mean) << ','
        << fmt(cell.z_vs_conditional) << ',' << fmt(cell.report.z_score)
        << '\n';
  }
  write_text(ctx.out_dir / "quenched_erg.csv", csv.str());

  std::ostringstream summary;
  summary << "pass,max_pair_z,max_target_z,max_conditional_z,z_threshold,"
             "target,target_se\n"
          << (report.pass ? 1 : 0) << ',' << fmt(report.max_pair_z) << ','
          << fmt(report.max_target_z) << ','
          << fmt(report.max_conditional_z) << ','
          << fmt(report.z_threshold_used) << ','
          << fmt(report.cells.front().report.target) << ','
          << fmt(report.cells.front().report.target_std_error) << '\n';
  write_text(ctx.out_dir / "quenched_erg_summary.csv", summary.str());
  return report.pass;
}

bool run_shift_check(const RunContext& ctx) {
  const double tol = ctx.cfg.params.tol.value_or(1e-10);
  const auto n_labels =
      static_cast<std::uint64_t>(ctx.env.alphabet().size());

  std::ostringstream csv;
  csv << "instance,n,word,residual,pass\n";
  bool all = true;
  for (long long i = 0; i < ctx.cfg.params.instances; ++i) {
    RngStream rng(
        derive_seed(ctx.seed, static_cast<std::uint64_t>(i), /*tag=*/0x5C));
    const EnvPoint omega = ctx.env.sample_invariant(rng);
    const long long n = static_cast<long long>(
        rng.next_u64() %
        static_cast<std::uint64_t>(ctx.cfg.params.shift_n + 1));
    const std::size_t wlen = 1 + static_cast<std::size_t>(rng.next_u64() % 3);
    std::vector<Eigen::Index> word(wlen);
    for (Eigen::Index& a : word) {
      a = static_cast<Eigen::Index>(rng.next_u64() % n_labels);
    }
    const double residual = shift_identity_residual(ctx.env, omega, n, word);
    const bool pass = residual <= tol;
    all = all && pass;
    csv << i << ',' << n << ',' << join_word(ctx.env, word) << ','
        << fmt(residual) << ',' << (pass ? 1 : 0) << '\n';
  }
  write_text(ctx.out_dir / "shift_check.csv", csv.str());
  return all;
}

}  // namespace

double default_solver_tol(const EnvSystem& env) {
  return env.kind() == EnvKind::kIid || env.kind() == EnvKind::kMarkov ? 1e-5
                                                                       : 1e-8;
}

int run_experiment(const ExperimentConfig& config, const RunOptions& opts) {
  if (!config.env || !config.initial_state) {
    throw std::invalid_argument("run: config was not fully loaded");
  }
  RunContext ctx{config, *config.env, opts.seed_override.value_or(config.seed),
                 opts.threads < 1 ? 1 : opts.threads,
                 std::filesystem::path(
                     opts.out_override.value_or(config.output_dir))};
  std::filesystem::create_directories(ctx.out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  switch (config.experiment) {
    case ExperimentKind::kValidate:
      pass = run_validate(ctx);
      break;
    case ExperimentKind::kSimulate:
      pass = run_simulate(ctx);
      break;
    case ExperimentKind::kStationary:
      pass = run_stationary(ctx);
      break;
    case ExperimentKind::kCertify:
      pass = run_certify(ctx);
      break;
    case ExperimentKind::kLln:
      pass = run_lln(ctx);
      break;
    case ExperimentKind::kAnnealedLln:
      pass = run_annealed_lln(ctx);
      break;
    case ExperimentKind::kQuenchedErg:
      pass = run_quenched_erg(ctx);
      break;
    case ExperimentKind::kShiftCheck:
      pass = run_shift_check(ctx);
      break;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["experiment"] = experiment_kind_name(config.experiment);
  manifest["config_path"] = config.source_path;
  manifest["config_hash"] = fmt_hex(config.config_hash);
  manifest["seed"] = ctx.seed;
  manifest["threads"] = ctx.threads;
  manifest["pass"] = pass;
  manifest["wall_time_seconds"] = wall;
  {
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    manifest["timestamp"] = stamp;
  }
  write_text(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");

  return pass ? 0 : 1;
}

}  // namespace dqt
