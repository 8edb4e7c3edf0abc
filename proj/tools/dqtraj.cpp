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
//
// dqtraj: simulate and verify disordered quantum trajectories from a JSON
// config. One subcommand per experiment; see README for the config schema.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dqt/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  bool out_set = false;
  int threads = 0;
};

int env_threads_fallback() {
  const char* raw = std::getenv("DQTRAJ_THREADS");
  if (raw == nullptr) return 1;
  const int n = std::atoi(raw);
  return n >= 1 ? n : 1;
}

void add_common_flags(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "Path to the JSON config")
      ->required();
  sub->add_option("--seed", flags.seed, "Master seed override")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  sub->add_option("--out", flags.out_dir, "Output directory override")
      ->each([&flags](const std::string&) { flags.out_set = true; });
  sub->add_option("--threads", flags.threads,
                  "Worker threads (default: DQTRAJ_THREADS or 1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disordered quantum trajectory simulator and verifier"};
  app.require_subcommand(1);

  const std::pair<const char*, const char*> commands[] = {
      {"validate", "Check the configured Kraus fibers"},
      {"simulate", "Sample trajectories and dump outcome records"},
      {"stationary", "Solve for the stochastically stationary state"},
      {"certify", "Heuristic dynamical-ergodicity certification"},
      {"lln", "Outcome law of large numbers against the annealed target"},
      {"annealed-lln", "Exact Cesaro averages of shifted annealed events"},
      {"quenched-erg", "Cross-realization Birkhoff-average compatibility"},
      {"shift-check", "Shift identity of the matrix-valued measure"},
  };

  CommonFlags flags;
  for (const auto& [name, help] : commands) {
    add_common_flags(app.add_subcommand(name, help), flags);
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    dqt::ExperimentConfig config = dqt::load_config(flags.config_path);
    config.experiment = *dqt::experiment_kind_from(command);

    dqt::RunOptions opts;
    if (flags.seed_set) opts.seed_override = flags.seed;
    if (flags.out_set) opts.out_override = flags.out_dir;
    opts.threads = flags.threads >= 1 ? flags.threads : env_threads_fallback();

    const int status = dqt::run_experiment(config, opts);
    std::cout << command << ": " << (status == 0 ? "PASS" : "FAIL")
              << " (results in "
              << opts.out_override.value_or(config.output_dir) << ")\n";
    return status;
  } catch (const dqt::ConfigLoadError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << command << ": error: " << e.what() << '\n';
    return 2;
  }
}
