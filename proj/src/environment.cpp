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

#include "dqt/environment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace dqt {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Cumulative sampling in index order; roundoff residual goes to the final
// index, ties break toward the earlier index.
int sample_discrete(const std::vector<double>& weights, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::vector<double> row_of(const Eigen::MatrixXd& m, int row) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out[static_cast<std::size_t>(j)] = m(row, j);
  }
  return out;
}

bool irreducible(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  // Reachability closure over positive entries; irreducible iff the closure
  // is complete.
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    std::vector<int> stack = {i};
    reach[i][i] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        if (p(v, w) > 0.0 && !reach[i][w]) {
          reach[i][w] = true;
          stack.push_back(w);
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!reach[i][j]) return false;
    }
  }
  return true;
}

std::vector<double> solve_stationary(const Eigen::MatrixXd& p) {
  // Left fixed vector of P: eigenvector of P^T at the eigenvalue nearest 1.
  Eigen::EigenSolver<Eigen::MatrixXd> es(p.transpose());
  int best = 0;
  double best_gap = std::abs(es.eigenvalues()[0] - std::complex<double>(1, 0));
  for (int i = 1; i < es.eigenvalues().size(); ++i) {
    const double gap = std::abs(es.eigenvalues()[i] - std::complex<double>(1, 0));
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  if (v.sum() < 0) v = -v;
  std::vector<double> pi(static_cast<std::size_t>(v.size()));
  const double total = v.sum();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    pi[static_cast<std::size_t>(i)] = v[i] / total;
  }
  return pi;
}

double stationarity_defect(const Eigen::MatrixXd& p,
                           const std::vector<double>& pi) {
  double defect = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      col += pi[static_cast<std::size_t>(i)] * p(i, j);
    }
    defect += std::abs(col - pi[static_cast<std::size_t>(j)]);
  }
  return defect;
}

}  // namespace

std::string env_kind_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::kConstant:
      return "constant";
    case EnvKind::kPeriodic:
      return "periodic";
    case EnvKind::kQuasiperiodic:
      return "quasiperiodic";
    case EnvKind::kIid:
      return "iid";
    case EnvKind::kMarkov:
      return "markov";
  }
  return "?";
}

double EnvPoint::torus_value(double alpha) const {
  double x = std::fmod(torus_base + static_cast<double>(torus_steps) * alpha,
                       1.0);
  if (x < 0.0) x += 1.0;
  return x;
}

KrausSet apply_torus_family(const std::string& name, const KrausSet& base,
                            double x) {
  const Eigen::Index d = base.dim;
  CMatrix u;
  if (name == "phase") {
    u = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      u(k, k) = std::polar(1.0, kTwoPi * static_cast<double>(k) * x);
    }
  } else if (name == "rotation") {
    if (d < 2) {
      throw std::invalid_argument("torus family 'rotation' needs dim >= 2");
    }
    u = CMatrix::Identity(d, d);
    const double c = std::cos(kTwoPi * x);
    const double s = std::sin(kTwoPi * x);
    u(0, 0) = c;
    u(0, 1) = -s;
    u(1, 0) = s;
    u(1, 1) = c;
  } else {
    throw std::invalid_argument("unknown torus family '" + name + "'");
  }
  KrausSet out = base;
  for (CMatrix& op : out.ops) op = u * op;
  return out;
}

bool torus_family_known(const std::string& name) {
  return name == "phase" || name == "rotation";
}

void EnvSystem::validate_fibers() {
  if (fibers_.empty()) {
    throw std::invalid_argument("environment: no Kraus fibers configured");
  }
  dim_ = fibers_.front().dim;
  alphabet_ = fibers_.front().labels;
  for (std::size_t i = 0; i < fibers_.size(); ++i) {
    const KrausSet& f = fibers_[i];
    if (f.dim != dim_) {
      throw std::invalid_argument("environment: fiber " + std::to_string(i) +
                                  " has mismatched dimension");
    }
    if (f.labels != alphabet_) {
      throw std::invalid_argument("environment: fiber " + std::to_string(i) +
                                  " has mismatched alphabet");
    }
    const KrausValidation v = kraus_validate(f);
    if (!v.pass) {
      throw std::invalid_argument(
          "environment: fiber " + std::to_string(i) +
          " fails the stochasticity relation, residual " +
          std::to_string(v.residual));
    }
  }
}

EnvSystem EnvSystem::constant(KrausSet fiber) {
  EnvSystem env;
  env.kind_ = EnvKind::kConstant;
  env.fibers_ = {std::move(fiber)};
  env.validate_fibers();
  return env;
}

EnvSystem EnvSystem::periodic(std::vector<KrausSet> fibers) {
  EnvSystem env;
  env.kind_ = EnvKind::kPeriodic;
  env.fibers_ = std::move(fibers);
  env.validate_fibers();
  return env;
}

EnvSystem EnvSystem::quasiperiodic(std::string family, KrausSet base,
                                   double alpha) {
  EnvSystem env;
  env.kind_ = EnvKind::kQuasiperiodic;
  if (!torus_family_known(family)) {
    throw std::invalid_argument("unknown torus family '" + family + "'");
  }
  env.family_ = std::move(family);
  env.alpha_ = alpha;
  env.fibers_ = {std::move(base)};
  env.validate_fibers();
  return env;
}

EnvSystem EnvSystem::iid(std::vector<double> weights,
                         std::vector<KrausSet> fibers) {
  EnvSystem env;
  env.kind_ = EnvKind::kIid;
  if (weights.size() != fibers.size()) {
    throw std::invalid_argument("iid environment: one weight per fiber");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("iid environment: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("iid environment: weights must sum to 1");
  }
  env.weights_ = std::move(weights);
  env.fibers_ = std::move(fibers);
  env.validate_fibers();
  return env;
}

EnvSystem EnvSystem::markov(Eigen::MatrixXd transition,
                            std::vector<KrausSet> fibers,
                            std::vector<double> stationary) {
  EnvSystem env;
  env.kind_ = EnvKind::kMarkov;
  const int n = static_cast<int>(fibers.size());
  if (transition.rows() != n || transition.cols() != n) {
    throw std::invalid_argument("markov environment: transition shape");
  }
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (transition(i, j) < 0.0) {
        throw std::invalid_argument("markov environment: negative entry");
      }
      row += transition(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12) {
      throw std::invalid_argument("markov environment: row " +
                                  std::to_string(i) + " not stochastic");
    }
  }
  if (!irreducible(transition)) {
    throw std::invalid_argument("markov environment: transition not irreducible");
  }
  std::vector<double> pi =
      stationary.empty() ? solve_stationary(transition) : std::move(stationary);
  if (static_cast<int>(pi.size()) != n) {
    throw std::invalid_argument("markov environment: stationary size");
  }
  if (stationarity_defect(transition, pi) > 1e-12) {
    throw std::invalid_argument(
        "markov environment: supplied stationary vector is not stationary");
  }
  // Time-reversed kernel for the backward half of the two-sided shift.
  Eigen::MatrixXd rev(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      rev(j, i) = pi[static_cast<std::size_t>(i)] * transition(i, j) /
                  pi[static_cast<std::size_t>(j)];
    }
  }
  env.transition_ = std::move(transition);
  env.stationary_ = std::move(pi);
  env.reverse_transition_ = std::move(rev);
  env.fibers_ = std::move(fibers);
  env.validate_fibers();
  return env;
}

EnvPoint EnvSystem::origin(std::uint64_t seq_seed) const {
  EnvPoint p;
  p.kind = kind_;
  if (kind_ == EnvKind::kIid || kind_ == EnvKind::kMarkov) {
    p.seq_seed = seq_seed;
    p.cache = std::make_shared<SymbolSequenceCache>();
  }
  return p;
}

EnvPoint EnvSystem::sample_invariant(RngStream& rng) const {
  EnvPoint p;
  p.kind = kind_;
  switch (kind_) {
    case EnvKind::kConstant:
      break;
    case EnvKind::kPeriodic: {
      const int k = static_cast<int>(rng.next_double() *
                                     static_cast<double>(fibers_.size()));
      p.index = std::min<int>(k, static_cast<int>(fibers_.size()) - 1);
      break;
    }
    case EnvKind::kQuasiperiodic:
      p.torus_base = rng.next_double();
      break;
    case EnvKind::kIid:
    case EnvKind::kMarkov:
      p.seq_seed = rng.next_u64();
      p.cache = std::make_shared<SymbolSequenceCache>();
      break;
  }
  return p;
}

EnvPoint EnvSystem::step(const EnvPoint& p) const {
  EnvPoint q = p;
  switch (kind_) {
    case EnvKind::kConstant:
      break;
    case EnvKind::kPeriodic:
      q.index = (p.index + 1) % static_cast<int>(fibers_.size());
      break;
    case EnvKind::kQuasiperiodic:
      q.torus_steps = p.torus_steps + 1;
      break;
    case EnvKind::kIid:
    case EnvKind::kMarkov:
      q.seq_pos = p.seq_pos + 1;
      break;
  }
  return q;
}

EnvPoint EnvSystem::step_back(const EnvPoint& p) const {
  EnvPoint q = p;
  switch (kind_) {
    case EnvKind::kConstant:
      break;
    case EnvKind::kPeriodic: {
      const int k = static_cast<int>(fibers_.size());
      q.index = (p.index + k - 1) % k;
      break;
    }
    case EnvKind::kQuasiperiodic:
      q.torus_steps = p.torus_steps - 1;
      break;
    case EnvKind::kIid:
    case EnvKind::kMarkov:
      q.seq_pos = p.seq_pos - 1;
      break;
  }
  return q;
}

EnvPoint EnvSystem::step_n(EnvPoint p, long long n) const {
  while (n > 0) {
    p = step(p);
    --n;
  }
  while (n < 0) {
    p = step_back(p);
    ++n;
  }
  return p;
}

int EnvSystem::symbol_at(const EnvPoint& p) const {
  switch (kind_) {
    case EnvKind::kConstant:
      return 0;
    case EnvKind::kPeriodic:
      return p.index;
    case EnvKind::kQuasiperiodic:
      throw std::logic_error("symbol_at: torus environment has no symbols");
    case EnvKind::kIid:
    case EnvKind::kMarkov:
      break;
  }
  if (!p.cache) {
    throw std::logic_error("symbol_at: sequence point without cache");
  }
  SymbolSequenceCache& cache = *p.cache;
  const long long idx = p.seq_pos;

  auto draw = [&](long long at, int prev) {
    const double u = indexed_uniform(p.seq_seed, at);
    if (kind_ == EnvKind::kIid) return sample_discrete(weights_, u);
    if (at == 0) return sample_discrete(stationary_, u);
    if (at > 0) return sample_discrete(row_of(transition_, prev), u);
    return sample_discrete(row_of(reverse_transition_, prev), u);
  };

  if (idx >= 0) {
    while (static_cast<long long>(cache.forward.size()) <= idx) {
      const long long at = static_cast<long long>(cache.forward.size());
      const int prev = at == 0 ? -1 : cache.forward.back();
      cache.forward.push_back(draw(at, prev));
    }
    return cache.forward[static_cast<std::size_t>(idx)];
  }

  // Backward symbols hang off symbol 0.
  if (cache.forward.empty()) cache.forward.push_back(draw(0, -1));
  const long long depth = -idx;
  while (static_cast<long long>(cache.backward.size()) < depth) {
    const long long at =
        -(static_cast<long long>(cache.backward.size()) + 1);
    const int prev =
        cache.backward.empty() ? cache.forward.front() : cache.backward.back();
    cache.backward.push_back(draw(at, prev));
  }
  return cache.backward[static_cast<std::size_t>(depth - 1)];
}

KrausSet EnvSystem::ensemble_at(const EnvPoint& p) const {
  switch (kind_) {
    case EnvKind::kConstant:
      return fibers_[0];
    case EnvKind::kPeriodic:
      return fibers_[static_cast<std::size_t>(p.index)];
    case EnvKind::kQuasiperiodic:
      return apply_torus_family(family_, fibers_[0], p.torus_value(alpha_));
    case EnvKind::kIid:
    case EnvKind::kMarkov:
      return fibers_[static_cast<std::size_t>(symbol_at(p))];
  }
  throw std::logic_error("ensemble_at: unreachable");
}

}  // namespace dqt
