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

#include "dqt/config.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace dqt {

namespace {

using nlohmann::json;

struct ErrorSink {
  std::vector<std::string> errors;

  void add(std::string msg) { errors.push_back(std::move(msg)); }
  bool ok() const { return errors.empty(); }
};

// d x d real array -> matrix; reports shape problems under `field`.
bool parse_real_grid(const json& j, Eigen::Index d, const std::string& field,
                     ErrorSink& sink, Eigen::MatrixXd& out) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != d) {
    sink.add(field + ": expected " + std::to_string(d) + " rows");
    return false;
  }
  out.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      sink.add(field + ": row " + std::to_string(r) + " needs " +
               std::to_string(d) + " entries");
      return false;
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      const json& cell = row[static_cast<std::size_t>(c)];
      if (!cell.is_number()) {
        sink.add(field + ": non-numeric entry at (" + std::to_string(r) +
                 "," + std::to_string(c) + ")");
        return false;
      }
      out(r, c) = cell.get<double>();
    }
  }
  return true;
}

// Complex matrices enter as paired real/imag grids {"re": [[..]], "im": ...}.
bool parse_cmatrix(const json& j, Eigen::Index d, const std::string& field,
                   ErrorSink& sink, CMatrix& out) {
  if (!j.is_object() || !j.contains("re")) {
    sink.add(field + ": expected an object with \"re\" (and optional \"im\")");
    return false;
  }
  Eigen::MatrixXd re;
  if (!parse_real_grid(j["re"], d, field + ".re", sink, re)) return false;
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(d, d);
  if (j.contains("im") && !parse_real_grid(j["im"], d, field + ".im", sink, im)) {
    return false;
  }
  out = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
  return true;
}

bool parse_fiber(const json& j, Eigen::Index d,
                 const std::vector<std::string>& alphabet,
                 const std::string& field, ErrorSink& sink, KrausSet& out) {
  if (!j.is_array() || j.size() != alphabet.size()) {
    sink.add(field + ": expected one operator per alphabet label (" +
             std::to_string(alphabet.size()) + ")");
    return false;
  }
  out.dim = d;
  out.labels = alphabet;
  out.ops.clear();
  out.ops.reserve(alphabet.size());
  for (std::size_t a = 0; a < alphabet.size(); ++a) {
    CMatrix m;
    if (!parse_cmatrix(j[a], d, field + "[" + alphabet[a] + "]", sink, m)) {
      return false;
    }
    out.ops.push_back(std::move(m));
  }
  return true;
}

bool parse_weights(const json& j, const std::string& field, ErrorSink& sink,
                   std::vector<double>& out) {
  if (!j.is_array() || j.empty()) {
    sink.add(field + ": expected a non-empty numeric array");
    return false;
  }
  out.clear();
  for (const json& v : j) {
    if (!v.is_number()) {
      sink.add(field + ": non-numeric entry");
      return false;
    }
    out.push_back(v.get<double>());
  }
  return true;
}

// Outcome words may mix label strings and integer indices.
void parse_word(const json& j, const std::vector<std::string>& alphabet,
                const std::string& field, ErrorSink& sink,
                std::vector<Eigen::Index>& out) {
  if (!j.is_array()) {
    sink.add(field + ": expected an array of labels or indices");
    return;
  }
  out.clear();
  for (const json& v : j) {
    if (v.is_number_integer()) {
      const auto idx = v.get<long long>();
      if (idx < 0 || idx >= static_cast<long long>(alphabet.size())) {
        sink.add(field + ": index " + std::to_string(idx) + " out of range");
        return;
      }
      out.push_back(static_cast<Eigen::Index>(idx));
    } else if (v.is_string()) {
      const std::string label = v.get<std::string>();
      const auto it =
          std::find(alphabet.begin(), alphabet.end(), label);
      if (it == alphabet.end()) {
        sink.add(field + ": unknown label \"" + label + "\"");
        return;
      }
      out.push_back(
          static_cast<Eigen::Index>(std::distance(alphabet.begin(), it)));
    } else {
      sink.add(field + ": entries must be labels or indices");
      return;
    }
  }
}

std::shared_ptr<const EnvSystem> build_environment(
    const json& j, Eigen::Index d, const std::vector<std::string>& alphabet,
    ErrorSink& sink) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    sink.add("environment: missing string field \"kind\"");
    return nullptr;
  }
  const std::string kind = j["kind"].get<std::string>();

  auto fibers_of = [&](const std::string& field,
                       std::size_t expected) -> std::vector<KrausSet> {
    std::vector<KrausSet> fibers;
    if (!j.contains(field) || !j[field].is_array()) {
      sink.add("environment." + field + ": missing fiber array");
      return fibers;
    }
    const json& arr = j[field];
    if (expected != 0 && arr.size() != expected) {
      sink.add("environment." + field + ": expected " +
               std::to_string(expected) + " fibers, got " +
               std::to_string(arr.size()));
      return {};
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      KrausSet fiber;
      if (!parse_fiber(arr[i], d, alphabet,
                       "environment." + field + "[" + std::to_string(i) + "]",
                       sink, fiber)) {
        return {};
      }
      fibers.push_back(std::move(fiber));
    }
    return fibers;
  };

  try {
    if (kind == "constant") {
      std::vector<KrausSet> fibers = fibers_of("fibers", 1);
      if (!sink.ok() || fibers.empty()) return nullptr;
      return std::make_shared<EnvSystem>(
          EnvSystem::constant(std::move(fibers[0])));
    }
    if (kind == "periodic") {
      std::vector<KrausSet> fibers = fibers_of("fibers", 0);
      if (!sink.ok() || fibers.empty()) {
        if (sink.ok()) sink.add("environment.fibers: needs >= 1 fiber");
        return nullptr;
      }
      return std::make_shared<EnvSystem>(
          EnvSystem::periodic(std::move(fibers)));
    }
    if (kind == "quasiperiodic") {
      if (!j.contains("family") || !j["family"].is_string()) {
        sink.add("environment.family: missing parametric family name");
        return nullptr;
      }
      const std::string family = j["family"].get<std::string>();
      if (!torus_family_known(family)) {
        sink.add("environment.family: unknown parametric family \"" + family +
                 "\"");
        return nullptr;
      }
      KrausSet base;
      if (!j.contains("base") ||
          !parse_fiber(j["base"], d, alphabet, "environment.base", sink,
                       base)) {
        if (!j.contains("base")) sink.add("environment.base: missing fiber");
        return nullptr;
      }
      const double alpha = j.contains("alpha") && j["alpha"].is_number()
                               ? j["alpha"].get<double>()
                               : EnvSystem::kGoldenAlpha;
      return std::make_shared<EnvSystem>(
          EnvSystem::quasiperiodic(family, std::move(base), alpha));
    }
    if (kind == "iid") {
      std::vector<double> weights;
      if (!j.contains("weights") ||
          !parse_weights(j["weights"], "environment.weights", sink, weights)) {
        return nullptr;
      }
      std::vector<KrausSet> fibers = fibers_of("fibers", weights.size());
      if (!sink.ok() || fibers.empty()) return nullptr;
      return std::make_shared<EnvSystem>(
          EnvSystem::iid(std::move(weights), std::move(fibers)));
    }
    if (kind == "markov") {
      if (!j.contains("transition")) {
        sink.add("environment.transition: missing matrix");
        return nullptr;
      }
      const json& jt = j["transition"];
      if (!jt.is_array() || jt.empty()) {
        sink.add("environment.transition: expected a square array");
        return nullptr;
      }
      const auto s = static_cast<Eigen::Index>(jt.size());
      Eigen::MatrixXd transition;
      if (!parse_real_grid(jt, s, "environment.transition", sink,
                           transition)) {
        return nullptr;
      }
      std::vector<double> stationary;
      if (j.contains("stationary") &&
          !parse_weights(j["stationary"], "environment.stationary", sink,
                         stationary)) {
        return nullptr;
      }
      std::vector<KrausSet> fibers =
          fibers_of("fibers", static_cast<std::size_t>(s));
      if (!sink.ok() || fibers.empty()) return nullptr;
      return std::make_shared<EnvSystem>(EnvSystem::markov(
          std::move(transition), std::move(fibers), std::move(stationary)));
    }
    sink.add("environment.kind: unknown kind \"" + kind + "\"");
  } catch (const std::exception& e) {
    sink.add(std::string("environment: ") + e.what());
  }
  return nullptr;
}

void build_initial_state(const json& j, Eigen::Index d, ErrorSink& sink,
                         ExperimentConfig& cfg) {
  std::string kind = "maximally_mixed";
  if (j.is_object() && j.contains("kind") && j["kind"].is_string()) {
    kind = j["kind"].get<std::string>();
  } else if (!j.is_null() && !j.is_object()) {
    sink.add("initial_state: expected an object with \"kind\"");
    return;
  }

  try {
    if (kind == "maximally_mixed") {
      cfg.initial_state =
          std::make_shared<FixedState>(QuantumState::maximally_mixed(d));
      return;
    }
    if (kind == "pure_basis") {
      long long index = 0;
      if (j.contains("index") && j["index"].is_number_integer()) {
        index = j["index"].get<long long>();
      }
      if (index < 0 || index >= static_cast<long long>(d)) {
        sink.add("initial_state.index: out of range");
        return;
      }
      cfg.initial_state = std::make_shared<FixedState>(
          QuantumState::pure_basis(d, static_cast<Eigen::Index>(index)));
      return;
    }
    if (kind == "matrix") {
      CMatrix m;
      if (!parse_cmatrix(j, d, "initial_state", sink, m)) return;
      cfg.initial_state = std::make_shared<FixedState>(QuantumState(m));
      return;
    }
    if (kind == "stationary") {
      StationaryOptions solver;
      solver.n_max = cfg.params.solver_n_max;
      if (cfg.params.solver_tol) solver.tol = *cfg.params.solver_tol;
      cfg.initial_state = std::make_shared<StationaryAssignment>(solver);
      cfg.initial_is_stationary = true;
      return;
    }
    sink.add("initial_state.kind: unknown kind \"" + kind + "\"");
  } catch (const std::exception& e) {
    sink.add(std::string("initial_state: ") + e.what());
  }
}

void parse_params(const json& j, const std::vector<std::string>& alphabet,
                  ErrorSink& sink, ExperimentParams& p) {
  if (j.is_null()) return;
  if (!j.is_object()) {
    sink.add("params: expected an object");
    return;
  }
  auto get_ll = [&](const char* name, long long& out) {
    if (!j.contains(name)) return;
    if (!j[name].is_number_integer()) {
      sink.add(std::string("params.") + name + ": expected an integer");
      return;
    }
    out = j[name].get<long long>();
  };
  auto get_int = [&](const char* name, int& out) {
    long long v = out;
    get_ll(name, v);
    out = static_cast<int>(v);
  };
  get_ll("steps", p.steps);
  get_ll("trajectories", p.trajectories);
  get_ll("n_max", p.n_max);
  get_ll("solver_n_max", p.solver_n_max);
  get_ll("cylinder_start", p.cylinder_start);
  get_ll("shift_n", p.shift_n);
  get_ll("instances", p.instances);
  {
    long long mc = p.mc_samples;
    get_ll("mc_samples", mc);
    p.mc_samples = mc;
  }
  get_int("omega_samples", p.omega_samples);
  get_int("anchors", p.anchors);
  get_int("seed_states", p.seed_states);
  if (j.contains("tol")) {
    if (!j["tol"].is_number()) {
      sink.add("params.tol: expected a number");
    } else {
      p.tol = j["tol"].get<double>();
    }
  }
  if (j.contains("solver_tol")) {
    if (!j["solver_tol"].is_number()) {
      sink.add("params.solver_tol: expected a number");
    } else {
      p.solver_tol = j["solver_tol"].get<double>();
    }
  }
  if (j.contains("keep_states")) {
    if (!j["keep_states"].is_boolean()) {
      sink.add("params.keep_states: expected a boolean");
    } else {
      p.keep_states = j["keep_states"].get<bool>();
    }
  }
  if (j.contains("pattern")) {
    parse_word(j["pattern"], alphabet, "params.pattern", sink, p.pattern);
  }
  if (j.contains("word")) {
    parse_word(j["word"], alphabet, "params.word", sink, p.word);
  }
  if (j.contains("env_event")) {
    const json& f = j["env_event"];
    if (f.is_string() && f.get<std::string>() == "all") {
      p.env_event.all = true;
    } else if (f.is_array()) {
      p.env_event.all = false;
      p.env_event.symbols.clear();
      for (const json& v : f) {
        if (!v.is_number_integer()) {
          sink.add("params.env_event: symbol entries must be integers");
          break;
        }
        p.env_event.symbols.push_back(v.get<int>());
      }
    } else {
      sink.add("params.env_event: expected \"all\" or an array of symbols");
    }
  }
}

}  // namespace

std::string experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kValidate:
      return "validate";
    case ExperimentKind::kSimulate:
      return "simulate";
    case ExperimentKind::kStationary:
      return "stationary";
    case ExperimentKind::kCertify:
      return "certify";
    case ExperimentKind::kLln:
      return "lln";
    case ExperimentKind::kAnnealedLln:
      return "annealed-lln";
    case ExperimentKind::kQuenchedErg:
      return "quenched-erg";
    case ExperimentKind::kShiftCheck:
      return "shift-check";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_kind_from(const std::string& name) {
  static const std::pair<const char*, ExperimentKind> table[] = {
      {"validate", ExperimentKind::kValidate},
      {"simulate", ExperimentKind::kSimulate},
      {"stationary", ExperimentKind::kStationary},
      {"certify", ExperimentKind::kCertify},
      {"lln", ExperimentKind::kLln},
      {"annealed-lln", ExperimentKind::kAnnealedLln},
      {"quenched-erg", ExperimentKind::kQuenchedErg},
      {"shift-check", ExperimentKind::kShiftCheck},
  };
  for (const auto& [n, k] : table) {
    if (name == n) return k;
  }
  return std::nullopt;
}

ConfigLoadError::ConfigLoadError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

std::string ConfigLoadError::join(const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << "config: " << errors.size()
     << (errors.size() == 1 ? " error" : " errors");
  for (const std::string& e : errors) os << "\n  - " << e;
  return os.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

ExperimentConfig load_config(const std::string& path) {
  ErrorSink sink;

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigLoadError({"cannot open config file: " + path});
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string raw = buffer.str();

  json j;
  try {
    j = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ConfigLoadError({std::string("parse error: ") + e.what()});
  }

  ExperimentConfig cfg;
  cfg.source_path = path;
  cfg.config_hash = fnv1a64(raw);

  if (j.contains("dimension") && j["dimension"].is_number_integer() &&
      j["dimension"].get<long long>() >= 1) {
    cfg.dimension = static_cast<Eigen::Index>(j["dimension"].get<long long>());
  } else {
    sink.add("dimension: required positive integer");
  }

  if (j.contains("alphabet") && j["alphabet"].is_array() &&
      !j["alphabet"].empty()) {
    for (const json& v : j["alphabet"]) {
      if (!v.is_string()) {
        sink.add("alphabet: labels must be strings");
        break;
      }
      cfg.alphabet.push_back(v.get<std::string>());
    }
  } else {
    sink.add("alphabet: required non-empty array of labels");
  }

  // Optional: the CLI subcommand overrides it anyway.
  if (j.contains("experiment")) {
    if (!j["experiment"].is_string()) {
      sink.add("experiment: expected a string");
    } else {
      const std::string name = j["experiment"].get<std::string>();
      if (auto kind = experiment_kind_from(name)) {
        cfg.experiment = *kind;
      } else {
        sink.add("experiment: unknown kind \"" + name + "\"");
      }
    }
  }

  if (j.contains("seed")) {
    if (j["seed"].is_number_unsigned() || j["seed"].is_number_integer()) {
      cfg.seed = j["seed"].get<std::uint64_t>();
    } else {
      sink.add("seed: expected an unsigned integer");
    }
  }
  if (j.contains("output")) {
    if (j["output"].is_string()) {
      cfg.output_dir = j["output"].get<std::string>();
    } else {
      sink.add("output: expected a string path");
    }
  }

  if (!cfg.alphabet.empty()) {
    parse_params(j.contains("params") ? j["params"] : json(), cfg.alphabet,
                 sink, cfg.params);
  }

  if (cfg.dimension >= 1 && !cfg.alphabet.empty()) {
    if (j.contains("environment")) {
      cfg.env = build_environment(j["environment"], cfg.dimension,
                                  cfg.alphabet, sink);
    } else {
      sink.add("environment: required object");
    }
    build_initial_state(j.contains("initial_state") ? j["initial_state"]
                                                    : json(),
                        cfg.dimension, sink, cfg);
  }

  if (!sink.ok()) throw ConfigLoadError(std::move(sink.errors));
  return cfg;
}

}  // namespace dqt
