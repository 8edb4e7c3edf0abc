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

#include "dqt/channels.hpp"

#include <limits>
#include <set>
#include <stdexcept>

namespace dqt {

namespace {

// vec(v M v^dag) = (conj(v) kron v) vec(M) for column-major vec().
CMatrix conjugation_rep(const CMatrix& v) {
  const Eigen::Index d = v.rows();
  CMatrix rep(d * d, d * d);
  const CMatrix vc = v.conjugate();
  for (Eigen::Index bc = 0; bc < d; ++bc) {
    for (Eigen::Index br = 0; br < d; ++br) {
      rep.block(br * d, bc * d, d, d) = vc(br, bc) * v;
    }
  }
  return rep;
}

Eigen::Map<const Eigen::VectorXcd> vec_view(const CMatrix& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

}  // namespace

Eigen::Index KrausSet::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<Eigen::Index>(i);
  }
  throw std::invalid_argument("KrausSet: unknown outcome label '" + label +
                              "'");
}

KrausValidation kraus_validate(const KrausSet& k) {
  KrausValidation report;
  if (k.dim < 1 || k.ops.empty() || k.ops.size() != k.labels.size()) {
    report.pass = false;
    report.residual = std::numeric_limits<double>::infinity();
    return report;
  }
  std::set<std::string> uniq(k.labels.begin(), k.labels.end());
  if (uniq.size() != k.labels.size()) {
    report.pass = false;
    report.residual = std::numeric_limits<double>::infinity();
    return report;
  }
  CMatrix acc = CMatrix::Zero(k.dim, k.dim);
  for (const CMatrix& v : k.ops) {
    if (v.rows() != k.dim || v.cols() != k.dim || !all_finite(v)) {
      report.pass = false;
      report.residual = std::numeric_limits<double>::infinity();
      return report;
    }
    acc += v.adjoint() * v;
  }
  report.residual = trace_norm(acc - CMatrix::Identity(k.dim, k.dim));
  report.pass = report.residual <= kKrausTol;
  return report;
}

CMatrix apply_T(const KrausSet& k, Eigen::Index a, const CMatrix& m) {
  if (a < 0 || a >= k.size()) {
    throw std::invalid_argument("apply_T: outcome index out of range");
  }
  return k.ops[static_cast<std::size_t>(a)] * m *
         k.ops[static_cast<std::size_t>(a)].adjoint();
}

CMatrix apply_T(const KrausSet& k, const std::string& a, const CMatrix& m) {
  return apply_T(k, k.label_index(a), m);
}

CMatrix apply_T_adjoint(const KrausSet& k, Eigen::Index a, const CMatrix& m) {
  if (a < 0 || a >= k.size()) {
    throw std::invalid_argument("apply_T_adjoint: outcome index out of range");
  }
  return k.ops[static_cast<std::size_t>(a)].adjoint() * m *
         k.ops[static_cast<std::size_t>(a)];
}

CMatrix apply_T_adjoint(const KrausSet& k, const std::string& a,
                        const CMatrix& m) {
  return apply_T_adjoint(k, k.label_index(a), m);
}

SuperOp::SuperOp(Eigen::Index dim, CMatrix rep, bool cptp)
    : dim_(dim), rep_(std::move(rep)), cptp_(cptp) {
  if (rep_.rows() != dim_ * dim_ || rep_.cols() != dim_ * dim_) {
    throw std::invalid_argument("SuperOp: representation has wrong shape");
  }
  if (cptp_) {
    // Trace preservation is adjoint-unitality.
    const CMatrix eye = CMatrix::Identity(dim_, dim_);
    const CMatrix adj_i = adjoint().apply(eye);
    if (trace_norm(adj_i - eye) > kCompositionTol) {
      throw std::invalid_argument("SuperOp: CPTP flag but not trace preserving");
    }
  }
}

SuperOp SuperOp::identity(Eigen::Index dim) {
  return SuperOp(dim, CMatrix::Identity(dim * dim, dim * dim), true);
}

CMatrix SuperOp::apply(const CMatrix& m) const {
  if (m.rows() != dim_ || m.cols() != dim_) {
    throw std::invalid_argument("SuperOp::apply: dimension mismatch");
  }
  Eigen::VectorXcd out = rep_ * vec_view(m);
  return Eigen::Map<const CMatrix>(out.data(), dim_, dim_);
}

SuperOp SuperOp::adjoint() const {
  return SuperOp(dim_, rep_.adjoint(), false);
}

SuperOp SuperOp::then(const SuperOp& later) const {
  if (later.dim_ != dim_) {
    throw std::invalid_argument("SuperOp::then: dimension mismatch");
  }
  return SuperOp(dim_, later.rep_ * rep_, cptp_ && later.cptp_);
}

SuperOp channel_of(const KrausSet& k) {
  const KrausValidation v = kraus_validate(k);
  if (!v.pass) {
    throw std::invalid_argument("channel_of: invalid Kraus set, residual " +
                                std::to_string(v.residual));
  }
  CMatrix rep = CMatrix::Zero(k.dim * k.dim, k.dim * k.dim);
  for (const CMatrix& op : k.ops) rep += conjugation_rep(op);
  return SuperOp(k.dim, std::move(rep), true);
}

CMatrix apply_channel(const KrausSet& k, const CMatrix& m) {
  CMatrix out = CMatrix::Zero(k.dim, k.dim);
  for (const CMatrix& v : k.ops) out += v * m * v.adjoint();
  return out;
}

CMatrix apply_channel_adjoint(const KrausSet& k, const CMatrix& m) {
  CMatrix out = CMatrix::Zero(k.dim, k.dim);
  for (const CMatrix& v : k.ops) out += v.adjoint() * m * v;
  return out;
}

SuperOp compose_forward(Eigen::Index dim, std::span<const KrausSet> chain) {
  const Eigen::Index d = dim;
  SuperOp acc = SuperOp::identity(d);
  for (const KrausSet& k : chain) {
    if (k.dim != d) {
      throw std::invalid_argument("compose_forward: dimension mismatch");
    }
    acc = acc.then(channel_of(k));
  }
  return acc;
}

CMatrix word_operator(std::span<const KrausSet> chain,
                      std::span<const Eigen::Index> word) {
  if (chain.size() != word.size()) {
    throw std::invalid_argument("word_operator: chain/word length mismatch");
  }
  if (chain.empty()) {
    throw std::invalid_argument("word_operator: empty word");
  }
  const Eigen::Index d = chain.front().dim;
  CMatrix acc = CMatrix::Identity(d, d);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const KrausSet& k = chain[i];
    if (k.dim != d) {
      throw std::invalid_argument("word_operator: dimension mismatch");
    }
    const Eigen::Index a = word[i];
    if (a < 0 || a >= k.size()) {
      throw std::invalid_argument("word_operator: outcome index out of range");
    }
    acc = k.ops[static_cast<std::size_t>(a)] * acc;
  }
  return acc;
}

}  // namespace dqt
