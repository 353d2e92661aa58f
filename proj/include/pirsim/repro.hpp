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

#ifndef PIRSIM_REPRO_HPP_
#define PIRSIM_REPRO_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pirsim/rational.hpp"
#include "pirsim/robust_scheme.hpp"
#include "pirsim/simulator.hpp"

namespace pirsim {

/// One verifiable claim about a reference scenario, suitable for a PASS/FAIL
/// report line.
struct ReproCheck {
  std::string label;
  bool pass = false;
};

namespace repro_detail {

enum class PayloadKind { kPure, kUnit, kExtra };

/// Expected structural class of one node's query: a fresh pad alone, a fresh
/// pad plus a unit for one stripe of the requested file, or a fresh pad plus
/// a reused earlier pad. Index is the stripe (kUnit) or the pad (kExtra).
struct ExpectedQuery {
  PayloadKind kind = PayloadKind::kPure;
  int index = -1;
};

inline ExpectedQuery pure() { return ExpectedQuery{PayloadKind::kPure, -1}; }
inline ExpectedQuery unit(int stripe) { return ExpectedQuery{PayloadKind::kUnit, stripe}; }
inline ExpectedQuery extra(int pad) { return ExpectedQuery{PayloadKind::kExtra, pad}; }

/// node -> expected class; nodes absent from the map must receive no query.
using ExpectedColumn = std::map<int, ExpectedQuery>;

inline std::string class_name(const ExpectedQuery& e) {
  switch (e.kind) {
    case PayloadKind::kPure:
      return "fresh pad only";
    case PayloadKind::kUnit:
      return "pad + e[" + std::to_string(e.index + 1) + "]";
    case PayloadKind::kExtra:
      return "pad + u[" + std::to_string(e.index + 1) + "]";
  }
  return "?";
}

inline bool query_matches(const QuerySpec& got, const ExpectedQuery& want, int expected_pad,
                          int file, int alpha) {
  if (got.fresh_pad != expected_pad) return false;
  switch (want.kind) {
    case PayloadKind::kPure:
      return got.pure();
    case PayloadKind::kUnit:
      return got.unit_pos == file * alpha + want.index && got.extra_pad == -1;
    case PayloadKind::kExtra:
      return got.extra_pad == want.index && got.unit_pos == -1;
  }
  return false;
}

/// Emits one PASS/FAIL line per node cell, including "no query" cells.
inline void check_column(std::vector<ReproCheck>& out, const std::string& where,
                         const SubquerySpec& got, const ExpectedColumn& want, int n, int file,
                         int alpha) {
  for (int node = 0; node < n; ++node) {
    const auto wit = want.find(node);
    const auto git = got.queries.find(node);
    std::string label = where + " node " + std::to_string(node + 1) + ": ";
    bool pass = false;
    if (wit == want.end()) {
      label += "no query";
      pass = git == got.queries.end();
    } else {
      label += class_name(wit->second);
      pass = git != got.queries.end() &&
             query_matches(git->second, wit->second, got.pad, file, alpha);
    }
    out.push_back({label, pass});
  }
}

inline void check(std::vector<ReproCheck>& out, const std::string& label, bool pass) {
  out.push_back({label, pass});
}

/// Runs one retrieval session against `storage` and records whether it
/// decoded correctly at exactly the expected download rate.
inline void check_session(std::vector<ReproCheck>& out, const std::string& label,
                          const StorageSystem& storage, const SystemConfig& cfg, int file,
                          const std::vector<int>& failed, const Rational& want,
                          std::uint64_t seed) {
  FailureModel fm;
  if (!failed.empty()) {
    fm.kind = FailureModel::Kind::kFixed;
    fm.fixed = failed;
  }
  const SessionOutcome run = run_session(storage, cfg, file, fm, seed);
  check(out, label + " (cPoP = " + want.str() + ")", run.ok && run.cpop == want);
}

}  // namespace repro_detail

/// Rebuilds the (4,2) one-robust reference scenario over GF(3) and checks the
/// query classes of the initial round and of all four single-failure repair
/// rounds, plus exact download rates on live sessions.
inline std::vector<ReproCheck> repro_4x2() {
  using namespace repro_detail;
  std::vector<ReproCheck> out;
  const int n = 4, k = 2, nu = 1, m = 2;
  const std::uint32_t q = 3;
  const UniversalParams up = universal_params(n, k, nu);

  for (int file = 0; file < m; ++file) {
    const std::string fid = "(4,2) f=" + std::to_string(file + 1);
    try {
      const SessionStructure base = plan_structure(up, q, m, file, {});
      check(out, fid + " initial round: 1 subquery",
            base.layer1_count == 1 && static_cast<int>(base.subqueries.size()) == 1);
      const ExpectedColumn layer1 = {{0, pure()}, {1, pure()}, {2, unit(0)}, {3, unit(0)}};
      check_column(out, fid + " initial", base.subqueries[0], layer1, n, file, up.alpha);

      const std::vector<ExpectedColumn> columns = {
          {{1, pure()}, {2, extra(0)}, {3, pure()}},
          {{0, pure()}, {2, extra(0)}, {3, pure()}},
          {{0, unit(0)}, {1, pure()}, {3, pure()}},
          {{0, unit(0)}, {1, pure()}, {2, pure()}},
      };
      for (int u = 0; u < n; ++u) {
        const std::string cid = fid + " node " + std::to_string(u + 1) + " down, repair";
        const SessionStructure st = plan_structure(up, q, m, file, {u});
        const bool one_extra =
            static_cast<int>(st.subqueries.size()) == st.layer1_count + 1;
        check(out, cid + ": 1 repair subquery", one_extra);
        if (one_extra)
          check_column(out, cid, st.subqueries[st.layer1_count], columns[u], n, file, up.alpha);
      }
    } catch (const std::exception& e) {
      check(out, fid + " construction failed: " + std::string(e.what()), false);
    }
  }

  const SystemConfig cfg{n, k, q, 1, m, nu};
  Rng store_rng(0x42a7);
  const StorageSystem storage = random_storage(make_mds_code(n, k, q), 1, m, up.alpha, store_rng);
  check_session(out, "(4,2) session, no failures", storage, cfg, 0, {}, Rational(2, 1), 11);
  for (int u = 0; u < n; ++u)
    check_session(out, "(4,2) session, node " + std::to_string(u + 1) + " down", storage, cfg,
                  u % m, {u}, Rational(3, 1), 12 + static_cast<std::uint64_t>(u));
  return out;
}

/// Rebuilds the (5,2) two-robust reference scenario over GF(5): initial-round
/// classes, all five single-failure repair columns, the structural shape of
/// the two-failure repair plan, and exact download rates for 0, 1, and 2
/// failures on live sessions.
inline std::vector<ReproCheck> repro_5x2() {
  using namespace repro_detail;
  std::vector<ReproCheck> out;
  const int n = 5, k = 2, nu = 2, m = 2;
  const std::uint32_t q = 5;
  const UniversalParams up = universal_params(n, k, nu);

  for (int file = 0; file < m; ++file) {
    const std::string fid = "(5,2) f=" + std::to_string(file + 1);
    try {
      const SessionStructure base = plan_structure(up, q, m, file, {});
      check(out, fid + " initial round: 2 subqueries",
            base.layer1_count == 2 && static_cast<int>(base.subqueries.size()) == 2);
      const ExpectedColumn j0 = {
          {0, unit(0)}, {1, pure()}, {2, unit(1)}, {3, unit(1)}, {4, pure()}};
      const ExpectedColumn j1 = {
          {0, pure()}, {1, unit(0)}, {2, unit(2)}, {3, unit(2)}, {4, pure()}};
      check_column(out, fid + " initial sq1", base.subqueries[0], j0, n, file, up.alpha);
      check_column(out, fid + " initial sq2", base.subqueries[1], j1, n, file, up.alpha);

      const std::vector<ExpectedColumn> columns = {
          {{1, extra(1)}, {2, unit(0)}, {3, pure()}, {4, pure()}},
          {{0, extra(0)}, {2, unit(0)}, {3, pure()}, {4, pure()}},
          {{0, unit(1)}, {1, unit(2)}, {3, pure()}, {4, pure()}},
          {{0, unit(1)}, {1, unit(2)}, {2, pure()}, {4, pure()}},
          {{0, extra(0)}, {1, extra(1)}, {2, pure()}, {3, pure()}},
      };
      for (int u = 0; u < n; ++u) {
        const std::string cid = fid + " node " + std::to_string(u + 1) + " down, repair";
        const SessionStructure st = plan_structure(up, q, m, file, {u});
        const bool one_extra =
            static_cast<int>(st.subqueries.size()) == st.layer1_count + 1;
        check(out, cid + ": 1 repair subquery", one_extra);
        if (one_extra)
          check_column(out, cid, st.subqueries[st.layer1_count], columns[u], n, file, up.alpha);
      }
    } catch (const std::exception& e) {
      check(out, fid + " construction failed: " + std::string(e.what()), false);
    }
  }

  // Two failures: the repair payload set is determined (each lost stripe unit
  // once plus the lost reusable pad once) but its spread over the four repair
  // subqueries admits several valid placements, so cells are checked as a
  // multiset rather than per node.
  try {
    const int file = 0;
    const SessionStructure st = plan_structure(up, q, m, file, {0, 2});
    check(out, "(5,2) nodes 1,3 down: 4 repair subqueries",
          static_cast<int>(st.subqueries.size()) == st.layer1_count + 4);
    std::multiset<std::string> payloads;
    for (int s = st.layer1_count; s < static_cast<int>(st.subqueries.size()); ++s) {
      const SubquerySpec& sq = st.subqueries[s];
      bool shape_ok = sq.pad == s;
      int carriers = 0;
      std::set<int> recipients;
      for (const auto& [node, qs] : sq.queries) {
        recipients.insert(node);
        if (qs.fresh_pad != sq.pad) shape_ok = false;
        if (!qs.pure()) {
          ++carriers;
          if (qs.unit_pos >= 0)
            payloads.insert("e[" + std::to_string(qs.unit_pos - file * up.alpha + 1) + "]");
          else
            payloads.insert("u[" + std::to_string(qs.extra_pad + 1) + "]");
        }
      }
      if (recipients != std::set<int>{1, 3, 4}) shape_ok = false;
      check(out,
            "(5,2) nodes 1,3 down: repair sq" + std::to_string(s - st.layer1_count + 1) +
                " reaches nodes 2,4,5 with one compensating payload",
            shape_ok && carriers == 1);
    }
    const std::multiset<std::string> want = {"e[1]", "e[2]", "e[3]", "u[2]"};
    check(out, "(5,2) nodes 1,3 down: payloads are e[1], e[2], e[3], u[2] once each",
          payloads == want);
  } catch (const std::exception& e) {
    check(out, "(5,2) two-failure construction failed: " + std::string(e.what()), false);
  }

  const SystemConfig cfg{n, k, q, 1, m, nu};
  Rng store_rng(0x52a7);
  const StorageSystem storage = random_storage(make_mds_code(n, k, q), 1, m, up.alpha, store_rng);
  check_session(out, "(5,2) session, no failures", storage, cfg, 0, {}, Rational(5, 3), 21);
  for (int u = 0; u < n; ++u)
    check_session(out, "(5,2) session, node " + std::to_string(u + 1) + " down", storage, cfg,
                  u % m, {u}, Rational(2, 1), 22 + static_cast<std::uint64_t>(u));
  check_session(out, "(5,2) session, nodes 1,3 down", storage, cfg, 0, {0, 2}, Rational(3, 1),
                31);
  check_session(out, "(5,2) session, nodes 4,5 down", storage, cfg, 1, {3, 4}, Rational(3, 1),
                32);
  return out;
}

inline bool all_pass(const std::vector<ReproCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace pirsim

#endif  // PIRSIM_REPRO_HPP_
