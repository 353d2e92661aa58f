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

#ifndef PIRSIM_ROBUST_SCHEME_HPP_
#define PIRSIM_ROBUST_SCHEME_HPP_

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "pirsim/base_scheme.hpp"
#include "pirsim/rational.hpp"
#include "pirsim/rng.hpp"

namespace pirsim {

/// Dimensions of the two-layer scheme that stays download-optimal for every
/// failure count i <= nu. alpha is the common stripe count all per-i schemes
/// agree on; d[i] is the total number of subqueries used when exactly i nodes
/// fail. This is pure arithmetic: it is defined for every 1 <= k < n even
/// when the layer-1 query layout itself cannot be instantiated.
struct UniversalParams {
  int n = 0;
  int k = 0;
  int nu = 0;
  int alpha = 0;
  std::vector<int> d;          // d[0..nu], subqueries when i nodes fail
  std::vector<int> n_i;        // responsive nodes, n - i
  std::vector<int> alpha_i;    // per-i base stripe count
  std::vector<int> d_prime_i;  // per-i base subquery count
};

inline UniversalParams universal_params(int n, int k, int nu) {
  if (k < 1 || k >= n) throw std::invalid_argument("universal_params: need 1 <= k < n");
  if (nu < 0 || nu > n - k - 1)
    throw std::invalid_argument(
        "universal_params: nu must be in [0, n-k-1]; beyond that privacy costs the whole store");
  UniversalParams up;
  up.n = n;
  up.k = k;
  up.nu = nu;
  up.alpha = 1;
  for (int i = 0; i <= nu; ++i) {
    const BaseParams bp = base_params(n - i, k);
    up.n_i.push_back(n - i);
    up.alpha_i.push_back(bp.alpha_prime);
    up.d_prime_i.push_back(bp.d_prime);
    up.alpha = std::lcm(up.alpha, bp.alpha_prime);
  }
  for (int i = 0; i <= nu; ++i) up.d.push_back(up.d_prime_i[i] * (up.alpha / up.alpha_i[i]));
  return up;
}

/// Download-optimal rate for n_i responsive nodes: downloaded symbols per
/// retrieved file symbol.
inline Rational optimal_cpop(int n_i, int k) { return Rational(n_i, n_i - k); }

/// One lost layer-1 sub-response. A payload query lost with its node must be
/// re-asked as pad + unit elsewhere; a pure pad lost must be re-asked folded
/// into a fresh pad.
struct MissingPart {
  bool carries_unit = false;
  int unit_pos = -1;  // flat unit position when carries_unit
  int pad = -1;       // the layer-1 pad the lost query used
  int node = -1;      // the failed node it was sent to

  bool operator==(const MissingPart& o) const {
    return carries_unit == o.carries_unit && unit_pos == o.unit_pos && pad == o.pad &&
           node == o.node;
  }
};

/// The complete symbolic session: layer-1 subqueries to all n nodes followed
/// by the compensation subqueries to the responsive ones. Pad index always
/// equals subquery index.
struct SessionStructure {
  int n = 0;
  int k = 0;
  int nu = 0;
  std::uint32_t q = 2;
  int m = 0;
  int alpha = 0;
  int file = 0;              // 0-based
  std::vector<int> d;        // copied from UniversalParams
  std::vector<int> failed;   // sorted, 0-based
  int layer1_count = 0;      // = d[0]
  std::vector<SubquerySpec> subqueries;

  int pad_count() const { return d.at(failed.size()); }
  int coeff_len() const { return m * alpha; }
  bool is_failed(int node) const {
    return std::binary_search(failed.begin(), failed.end(), node);
  }
};

/// Layer 1: alpha/alpha_0 repetitions of the base scheme, repetition c
/// covering stripes [c*alpha_0, (c+1)*alpha_0) with its own fresh pads.
inline std::vector<SubquerySpec> layer1_structure(const UniversalParams& up, int m, int file) {
  std::vector<SubquerySpec> subs;
  const int copies = up.alpha / up.alpha_i[0];
  for (int c = 0; c < copies; ++c) {
    auto rep = base_subqueries(up.n, up.k, m, up.alpha, file, c * up.alpha_i[0],
                               c * up.d_prime_i[0]);
    for (auto& sq : rep) subs.push_back(std::move(sq));
  }
  return subs;
}

/// One missing part per (failed node, layer-1 subquery), failed nodes in
/// ascending order and subqueries in send order within each node.
inline std::vector<MissingPart> classify_missing(const std::vector<SubquerySpec>& layer1,
                                                 const std::vector<int>& failed) {
  std::vector<MissingPart> parts;
  for (int v : failed) {
    for (const auto& sq : layer1) {
      const QuerySpec& qs = sq.queries.at(v);
      MissingPart mp;
      mp.carries_unit = qs.unit_pos >= 0;
      mp.unit_pos = qs.unit_pos;
      mp.pad = sq.pad;
      mp.node = v;
      parts.push_back(mp);
    }
  }
  return parts;
}

/// What each node has been exposed to so far. Layer-2 eligibility reads:
/// a node may be asked pad+e_t only if it never saw a query containing e_t,
/// and pad+u_j only if it never received pure u_j nor u_j folded into some
/// other subquery's query. Receiving u_j as the fresh pad of subquery j
/// itself (pure or payload-carrying) does not count against the latter.
struct ExposureLedger {
  std::vector<std::set<int>> unit_seen;  // node -> unit positions
  std::vector<std::set<int>> pad_pure;   // pad -> nodes that got it pure
  std::vector<std::set<int>> pad_cross;  // pad -> nodes that saw it folded in elsewhere

  ExposureLedger(int n, int pads) : unit_seen(n), pad_pure(pads), pad_cross(pads) {}

  void record(int node, const QuerySpec& qs) {
    if (qs.unit_pos >= 0) unit_seen[node].insert(qs.unit_pos);
    if (qs.extra_pad >= 0) pad_cross[qs.extra_pad].insert(node);
    if (qs.pure()) pad_pure[qs.fresh_pad].insert(node);
  }

  bool eligible(int node, const MissingPart& mp) const {
    if (mp.carries_unit) return unit_seen[node].count(mp.unit_pos) == 0;
    return pad_pure[mp.pad].count(node) == 0 && pad_cross[mp.pad].count(node) == 0;
  }
};

using PlanValidator = std::function<bool(const SessionStructure&)>;

namespace detail {

class Layer2Search {
 public:
  Layer2Search(SessionStructure& st, ExposureLedger& ledger, std::vector<int> responsive,
               std::vector<std::vector<MissingPart>> groups, PlanValidator validate)
      : st_(st),
        ledger_(ledger),
        responsive_(std::move(responsive)),
        groups_(std::move(groups)),
        validate_(std::move(validate)) {}

  bool run() { return enter_group(0); }

 private:
  bool accept() const { return !validate_ || validate_(st_); }

  bool enter_group(std::size_t g) {
    if (g == groups_.size()) return accept();
    SubquerySpec sq;
    sq.pad = st_.layer1_count + static_cast<int>(g);
    st_.subqueries.push_back(std::move(sq));
    if (place_part(g, 0)) return true;
    st_.subqueries.pop_back();
    return false;
  }

  bool place_part(std::size_t g, std::size_t p) {
    const int idx = st_.layer1_count + static_cast<int>(g);
    const int pad = st_.subqueries[idx].pad;
    if (p == groups_[g].size()) {
      // Remaining responsive nodes take the pure fresh pad.
      std::vector<int> rest;
      for (int w : responsive_)
        if (!st_.subqueries[idx].queries.count(w)) rest.push_back(w);
      const QuerySpec pure{pad, -1, -1};
      for (int w : rest) {
        st_.subqueries[idx].queries[w] = pure;
        ledger_.record(w, pure);
      }
      if (enter_group(g + 1)) return true;
      for (int w : rest) {
        ledger_.pad_pure[pad].erase(w);
        st_.subqueries[idx].queries.erase(w);
      }
      return false;
    }
    const MissingPart& mp = groups_[g][p];
    for (int w : responsive_) {
      if (st_.subqueries[idx].queries.count(w)) continue;
      if (!ledger_.eligible(w, mp)) continue;
      const QuerySpec qs = mp.carries_unit ? QuerySpec{pad, -1, mp.unit_pos}
                                           : QuerySpec{pad, mp.pad, -1};
      st_.subqueries[idx].queries[w] = qs;
      ledger_.record(w, qs);
      if (place_part(g, p + 1)) return true;
      if (qs.unit_pos >= 0) ledger_.unit_seen[w].erase(qs.unit_pos);
      if (qs.extra_pad >= 0) ledger_.pad_cross[qs.extra_pad].erase(w);
      st_.subqueries[idx].queries.erase(w);
    }
    return false;
  }

  SessionStructure& st_;
  ExposureLedger& ledger_;
  std::vector<int> responsive_;
  std::vector<std::vector<MissingPart>> groups_;
  PlanValidator validate_;
};

}  // namespace detail

/// Build the complete session structure for target file `file` (0-based)
/// given the observed failure set. Missing parts are re-asked in
/// deterministic order: unit-carrying parts sorted by unit position, then
/// pad-only parts sorted by pad index, chunked n_i-k to a subquery. Each
/// part goes to the lowest-index eligible node; the search backtracks
/// across all eligible assignments, and when a validator is supplied only
/// assignments it accepts are emitted.
inline SessionStructure plan_structure(const UniversalParams& up, std::uint32_t q, int m,
                                       int file, const std::vector<int>& failed,
                                       const PlanValidator& validate = {}) {
  const int i = static_cast<int>(failed.size());
  if (i > up.nu) throw std::invalid_argument("plan_structure: more failures than nu");
  if (file < 0 || file >= m) throw std::invalid_argument("plan_structure: file out of range");
  for (int v : failed)
    if (v < 0 || v >= up.n) throw std::invalid_argument("plan_structure: bad node index");

  SessionStructure st;
  st.n = up.n;
  st.k = up.k;
  st.nu = up.nu;
  st.q = q;
  st.m = m;
  st.alpha = up.alpha;
  st.file = file;
  st.d = up.d;
  st.failed = failed;
  std::sort(st.failed.begin(), st.failed.end());
  if (std::adjacent_find(st.failed.begin(), st.failed.end()) != st.failed.end())
    throw std::invalid_argument("plan_structure: duplicate failed node");
  st.subqueries = layer1_structure(up, m, file);
  st.layer1_count = static_cast<int>(st.subqueries.size());

  ExposureLedger ledger(up.n, st.pad_count());
  for (const auto& sq : st.subqueries)
    for (const auto& [w, qs] : sq.queries) ledger.record(w, qs);

  if (i == 0) {
    if (validate && !validate(st))
      throw std::runtime_error("plan_structure: layer-1 plan failed validation");
    return st;
  }

  auto parts = classify_missing(st.subqueries, st.failed);
  std::stable_sort(parts.begin(), parts.end(), [](const MissingPart& a, const MissingPart& b) {
    if (a.carries_unit != b.carries_unit) return a.carries_unit;
    if (a.carries_unit) return std::tie(a.unit_pos, a.node) < std::tie(b.unit_pos, b.node);
    return std::tie(a.pad, a.node) < std::tie(b.pad, b.node);
  });

  const int gamma = up.n_i[i] - up.k;
  const int extra = up.d[i] - up.d[0];
  if (static_cast<int>(parts.size()) != gamma * extra)
    throw std::logic_error("plan_structure: missing-part count disagrees with group budget");
  std::vector<std::vector<MissingPart>> groups(extra);
  for (std::size_t t = 0; t < parts.size(); ++t) groups[t / gamma].push_back(parts[t]);

  std::vector<int> responsive;
  for (int w = 0; w < up.n; ++w)
    if (!st.is_failed(w)) responsive.push_back(w);

  detail::Layer2Search search(st, ledger, std::move(responsive), std::move(groups), validate);
  if (!search.run())
    throw std::runtime_error(
        "plan_structure: no eligible compensation assignment exists (parameter-regime bug)");
  return st;
}

/// A realized query: the coefficient vector actually sent plus its tags.
struct QueryVector {
  std::vector<FieldElement> coeffs;
  QuerySpec spec;

  bool operator==(const QueryVector& o) const { return coeffs == o.coeffs && spec == o.spec; }
};

/// Structure plus drawn pad values plus the per-node coefficient vectors.
struct SessionPlan {
  SessionStructure structure;
  std::vector<std::vector<FieldElement>> pads;      // pad_count() x coeff_len()
  std::vector<std::map<int, QueryVector>> queries;  // parallel to structure.subqueries
};

/// coeffs = pads of the composition summed, plus the unit vector if tagged.
/// With unpadded_payload set, unit-carrying queries omit their fresh pad;
/// this deliberately breaks privacy and exists as the auditor's negative
/// control.
inline std::vector<FieldElement> compose_query(const QuerySpec& qs,
                                               const std::vector<std::vector<FieldElement>>& pads,
                                               int coeff_len, std::uint32_t q,
                                               bool unpadded_payload = false) {
  std::vector<FieldElement> coeffs(coeff_len, FieldElement::zero(q));
  const bool drop_pad = unpadded_payload && qs.unit_pos >= 0;
  if (!drop_pad)
    for (int i = 0; i < coeff_len; ++i) coeffs[i] += pads.at(qs.fresh_pad)[i];
  if (qs.extra_pad >= 0)
    for (int i = 0; i < coeff_len; ++i) coeffs[i] += pads.at(qs.extra_pad)[i];
  if (qs.unit_pos >= 0) coeffs.at(qs.unit_pos) += FieldElement::one(q);
  return coeffs;
}

/// Draw the pads in index order and materialize every query. Pad draw order
/// is part of the determinism contract: same structure and generator state,
/// same plan.
inline SessionPlan realize_plan(const SessionStructure& st, Rng& rng,
                                bool unpadded_payload = false) {
  SessionPlan plan;
  plan.structure = st;
  plan.pads.reserve(st.pad_count());
  for (int j = 0; j < st.pad_count(); ++j) {
    std::vector<FieldElement> pad;
    pad.reserve(st.coeff_len());
    for (int i = 0; i < st.coeff_len(); ++i) pad.push_back(rng.uniform_field(st.q));
    plan.pads.push_back(std::move(pad));
  }
  plan.queries.resize(st.subqueries.size());
  for (std::size_t s = 0; s < st.subqueries.size(); ++s) {
    for (const auto& [w, qs] : st.subqueries[s].queries) {
      plan.queries[s][w] =
          QueryVector{compose_query(qs, plan.pads, st.coeff_len(), st.q, unpadded_payload), qs};
    }
  }
  return plan;
}

}  // namespace pirsim

#endif  // PIRSIM_ROBUST_SCHEME_HPP_
