// Copyright 2026 the pirsim authors
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

#ifndef PIRSIM_DECODER_HPP_
#define PIRSIM_DECODER_HPP_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pirsim/mds.hpp"
#include "pirsim/rational.hpp"
#include "pirsim/robust_scheme.hpp"

namespace pirsim {

/// The per-session constants every component agrees on.
struct SystemConfig {
  int n = 0;
  int k = 0;
  std::uint32_t q = 2;
  int ell = 1;
  int m = 0;
  int nu = 0;

  bool operator==(const SystemConfig& o) const {
    return n == o.n && k == o.k && q == o.q && ell == o.ell && m == o.m && nu == o.nu;
  }
};

/// Full record of one retrieval session: what was sent, what came back,
/// and the download ledger.
struct Transcript {
  SystemConfig config;
  std::uint64_t seed = 0;
  int file = 0;             // 0-based
  std::vector<int> failed;  // 0-based, sorted
  SessionPlan plan;
  std::vector<std::map<int, ExtSymbol>> responses;  // per subquery, responsive nodes only
  int downloaded = 0;                               // = total responses received
};

/// Linear system in the kα file symbols (columns t*k+b, stripe-major)
/// followed by the k * pad_count interference unknowns (columns
/// file_cols + j*k + b). One row per received response.
struct EquationSystem {
  FieldMatrix a;
  std::vector<ExtSymbol> rhs;
  int file_cols = 0;
  std::vector<std::pair<int, int>> row_source;  // (subquery, node)
};

namespace detail {

// A response to a query tagged (pads P, unit e) reads
//   sum_{j in P} sum_b G[b,node]*I_b(u_j) + sum_b G[b,node]*X_file[b,t].
inline void add_query_columns(FieldMatrix& a, int row, const QuerySpec& qs, int node,
                              const MdsCode& code, int file, int alpha) {
  const int file_cols = code.k * alpha;
  for (int b = 0; b < code.k; ++b) {
    const FieldElement g = code.generator.at(b, node);
    a.at(row, file_cols + qs.fresh_pad * code.k + b) += g;
    if (qs.extra_pad >= 0) a.at(row, file_cols + qs.extra_pad * code.k + b) += g;
  }
  if (qs.unit_pos >= 0) {
    const int t = qs.unit_pos - file * alpha;
    if (t < 0 || t >= alpha)
      throw std::logic_error("add_query_columns: unit outside the target file window");
    for (int b = 0; b < code.k; ++b) a.at(row, t * code.k + b) += code.generator.at(b, node);
  }
}

}  // namespace detail

inline EquationSystem build_system(const Transcript& tr, const MdsCode& code) {
  const SessionStructure& st = tr.plan.structure;
  int rows = 0;
  for (const auto& per_sub : tr.responses) rows += static_cast<int>(per_sub.size());
  EquationSystem sys;
  sys.file_cols = code.k * st.alpha;
  sys.a = FieldMatrix(rows, sys.file_cols + code.k * st.pad_count(), code.q);
  sys.rhs.reserve(rows);
  int row = 0;
  for (std::size_t s = 0; s < tr.responses.size(); ++s) {
    for (const auto& [node, resp] : tr.responses[s]) {
      if (st.is_failed(node))
        throw std::runtime_error("build_system: response from a node marked failed");
      const QuerySpec& qs = tr.plan.queries.at(s).at(node).spec;
      detail::add_query_columns(sys.a, row, qs, node, code, st.file, st.alpha);
      sys.rhs.push_back(resp);
      sys.row_source.emplace_back(static_cast<int>(s), node);
      ++row;
    }
  }
  return sys;
}

/// Solve the system and return the k x alpha file. Throws when the honest-
/// response invariants are violated: an inconsistent system means a corrupt
/// response, an undetermined file symbol means the plan was not decodable.
inline FileData decode_file(const EquationSystem& sys, int k, int alpha, int ell,
                            std::uint32_t q) {
  const LinearSolveResult res = gaussian_solve(sys.a, sys.rhs);
  if (!res.consistent) throw std::runtime_error("decode_file: inconsistent responses");
  for (int c = 0; c < sys.file_cols; ++c)
    if (!res.determined[c]) throw std::runtime_error("decode_file: file symbol undetermined");
  FileData fd(k, alpha, ell, q);
  for (int t = 0; t < alpha; ++t)
    for (int b = 0; b < k; ++b) fd.at(b, t) = res.values[t * k + b];
  return fd;
}

/// Downloaded symbols per retrieved file symbol, exact.
inline Rational compute_cpop(const Transcript& tr) {
  return Rational(tr.downloaded, (std::int64_t)tr.config.k * tr.plan.structure.alpha);
}

struct DecodeResult {
  FileData file;
  int equations_used = 0;
  Rational cpop;
};

inline DecodeResult decode(const Transcript& tr, const MdsCode& code) {
  const EquationSystem sys = build_system(tr, code);
  DecodeResult out;
  out.file = decode_file(sys, tr.config.k, tr.plan.structure.alpha, tr.config.ell, tr.config.q);
  out.equations_used = sys.a.rows();
  out.cpop = compute_cpop(tr);
  return out;
}

/// Symbolic rank check: with responses from every non-failed recipient,
/// would all file symbols be uniquely determined? Used to vet a candidate
/// plan before anything is sent.
inline bool structure_decodable(const SessionStructure& st, const MdsCode& code) {
  int rows = 0;
  for (const auto& sq : st.subqueries)
    for (const auto& [node, qs] : sq.queries) {
      (void)qs;
      if (!st.is_failed(node)) ++rows;
    }
  const int file_cols = code.k * st.alpha;
  FieldMatrix a(rows, file_cols + code.k * st.pad_count(), code.q);
  int row = 0;
  for (const auto& sq : st.subqueries)
    for (const auto& [node, qs] : sq.queries) {
      if (st.is_failed(node)) continue;
      detail::add_query_columns(a, row, qs, node, code, st.file, st.alpha);
      ++row;
    }
  const std::vector<ExtSymbol> zero_rhs(rows, ExtSymbol::zero(1, code.q));
  const LinearSolveResult res = gaussian_solve(a, zero_rhs);
  for (int c = 0; c < file_cols; ++c)
    if (!res.determined[c]) return false;
  return true;
}

inline PlanValidator decodability_validator(const MdsCode& code) {
  return [code](const SessionStructure& st) { return structure_decodable(st, code); };
}

}  // namespace pirsim

#endif  // PIRSIM_DECODER_HPP_
