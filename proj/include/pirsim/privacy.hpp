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

#ifndef PIRSIM_PRIVACY_HPP_
#define PIRSIM_PRIVACY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pirsim/decoder.hpp"
#include "pirsim/rational.hpp"
#include "pirsim/robust_scheme.hpp"
#include "pirsim/stats.hpp"

namespace pirsim {

/// Exact distribution of the query sequence one node receives, keyed by the
/// concatenated coefficient digits of its queries in send order.
struct QueryDistribution {
  std::map<std::string, Rational> mass;

  Rational total() const {
    Rational t(0, 1);
    for (const auto& [k, v] : mass) {
      (void)k;
      t = t + v;
    }
    return t;
  }
};

/// Exact total-variation distance between two distributions.
inline Rational tv_distance(const QueryDistribution& a, const QueryDistribution& b) {
  Rational sum(0, 1);
  auto absdiff = [](Rational x, Rational y) {
    Rational d = x + Rational(-y.num, y.den);
    if (d.num < 0) d.num = -d.num;
    return d;
  };
  for (const auto& [key, pa] : a.mass) {
    auto it = b.mass.find(key);
    sum = sum + absdiff(pa, it == b.mass.end() ? Rational(0, 1) : it->second);
  }
  for (const auto& [key, pb] : b.mass) {
    if (!a.mass.count(key)) sum = sum + pb;
  }
  return sum * Rational(1, 2);
}

namespace detail {

inline char coeff_digit(const FieldElement& e) {
  return static_cast<char>('0' + static_cast<int>(e.value()));
}

inline std::string sequence_key(const std::vector<std::vector<FieldElement>>& queries) {
  std::string key;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (i) key.push_back('|');
    for (const auto& e : queries[i]) key.push_back(coeff_digit(e));
  }
  return key;
}

}  // namespace detail

/// Exactly enumerate the distribution of the query sequence `node` receives
/// under the given session structure, by iterating every realization of the
/// pads that reach this node (the others integrate out). Throws when the
/// realization count exceeds `cap`.
inline QueryDistribution enumerate_node_distribution(const SessionStructure& st, int node,
                                                     std::uint64_t cap = 1ull << 24,
                                                     bool unpadded_payload = false) {
  std::vector<QuerySpec> received;
  std::set<int> pad_set;
  for (const auto& sq : st.subqueries) {
    auto it = sq.queries.find(node);
    if (it == sq.queries.end()) continue;
    received.push_back(it->second);
    for (int p : it->second.pads()) pad_set.insert(p);
  }
  const std::vector<int> pads(pad_set.begin(), pad_set.end());
  const int len = st.coeff_len();
  const std::uint64_t q = st.q;

  std::uint64_t total = 1;
  const std::uint64_t digits = static_cast<std::uint64_t>(pads.size()) * len;
  for (std::uint64_t i = 0; i < digits; ++i) {
    if (total > cap / q) throw std::runtime_error("enumerate_node_distribution: cap exceeded");
    total *= q;
  }

  std::vector<std::vector<FieldElement>> pad_values(
      st.pad_count(), std::vector<FieldElement>(len, FieldElement::zero(st.q)));
  std::vector<std::uint32_t> odo(digits, 0);

  std::map<std::string, std::uint64_t> counts;
  for (std::uint64_t it = 0; it < total; ++it) {
    for (std::size_t d = 0; d < digits; ++d)
      pad_values[pads[d / len]][d % len] = FieldElement(odo[d], st.q);
    std::vector<std::vector<FieldElement>> qs;
    qs.reserve(received.size());
    for (const auto& spec : received)
      qs.push_back(compose_query(spec, pad_values, len, st.q, unpadded_payload));
    ++counts[detail::sequence_key(qs)];
    for (std::size_t d = 0; d < digits; ++d) {
      if (++odo[d] < q) break;
      odo[d] = 0;
    }
  }

  QueryDistribution dist;
  for (const auto& [key, c] : counts)
    dist.mass[key] = Rational(static_cast<std::int64_t>(c), static_cast<std::int64_t>(total));
  return dist;
}

/// Marginal of one received query (by reception order) from a sequence
/// distribution whose keys were built by enumerate_node_distribution.
inline QueryDistribution marginal_of_query(const QueryDistribution& dist, int query_index,
                                           int coeff_len) {
  QueryDistribution out;
  const std::size_t begin = static_cast<std::size_t>(query_index) * (coeff_len + 1);
  for (const auto& [key, p] : dist.mass) {
    const std::string sub = key.substr(begin, coeff_len);
    auto it = out.mass.find(sub);
    if (it == out.mass.end())
      out.mass[sub] = p;
    else
      it->second = it->second + p;
  }
  return out;
}

struct NodeAudit {
  int node = -1;
  int pairs_compared = 0;
  std::string method;
  bool pass = false;
  double max_tv = 0.0;
};

struct AuditReport {
  std::vector<NodeAudit> nodes;
  bool all_pass = false;
};

/// Exact per-node privacy audit for one failure pattern: for every file pair
/// (f, f'), the enumerated query-sequence distributions must coincide.
inline AuditReport exact_audit(const UniversalParams& up, const SystemConfig& cfg,
                               const std::vector<int>& failed,
                               const PlanValidator& validate = {},
                               bool unpadded_payload = false, std::uint64_t cap = 1ull << 24) {
  std::vector<SessionStructure> sts;
  sts.reserve(cfg.m);
  for (int f = 0; f < cfg.m; ++f)
    sts.push_back(plan_structure(up, cfg.q, cfg.m, f, failed, validate));

  AuditReport report;
  report.all_pass = true;
  for (int node = 0; node < cfg.n; ++node) {
    NodeAudit na;
    na.node = node;
    na.method = "exact";
    na.pass = true;
    std::vector<QueryDistribution> dists;
    dists.reserve(cfg.m);
    for (int f = 0; f < cfg.m; ++f)
      dists.push_back(enumerate_node_distribution(sts[f], node, cap, unpadded_payload));
    for (int f1 = 0; f1 < cfg.m; ++f1)
      for (int f2 = f1 + 1; f2 < cfg.m; ++f2) {
        ++na.pairs_compared;
        const Rational tv = tv_distance(dists[f1], dists[f2]);
        na.max_tv = std::max(na.max_tv, tv.to_double());
        if (tv != Rational(0, 1)) na.pass = false;
      }
    report.all_pass = report.all_pass && na.pass;
    report.nodes.push_back(na);
  }
  return report;
}

struct SampledAuditOptions {
  std::uint64_t sessions = 100000;
  std::uint64_t seed = 1;
  double significance = 0.01;
  int hash_bins = 512;
  bool unpadded_payload = false;
};

/// Monte Carlo per-node privacy audit: for every file pair, two-sample
/// chi-square tests on each per-query coordinate marginal plus one joint
/// test over hashed sequence bins, Bonferroni-corrected so the whole audit
/// rejects a correct planner with probability at most `significance`.
inline AuditReport sampled_audit(const UniversalParams& up, const SystemConfig& cfg,
                                 const std::vector<int>& failed,
                                 const SampledAuditOptions& opt,
                                 const PlanValidator& validate = {}) {
  std::vector<SessionStructure> sts;
  sts.reserve(cfg.m);
  for (int f = 0; f < cfg.m; ++f)
    sts.push_back(plan_structure(up, cfg.q, cfg.m, f, failed, validate));

  const int len = sts[0].coeff_len();
  // received query count per node is file-independent
  std::vector<int> recv(cfg.n, 0);
  for (const auto& sq : sts[0].subqueries)
    for (const auto& [node, qs] : sq.queries) {
      (void)qs;
      ++recv[node];
    }

  // counts[f][node][t][coord][value], joint[f][node][bin]
  using Marginals = std::vector<std::vector<std::vector<std::vector<std::uint64_t>>>>;
  std::vector<Marginals> counts(cfg.m);
  std::vector<std::vector<std::vector<std::uint64_t>>> joint(cfg.m);
  for (int f = 0; f < cfg.m; ++f) {
    counts[f].resize(cfg.n);
    joint[f].assign(cfg.n, std::vector<std::uint64_t>(opt.hash_bins, 0));
    for (int node = 0; node < cfg.n; ++node)
      counts[f][node].assign(
          recv[node], std::vector<std::vector<std::uint64_t>>(
                          len, std::vector<std::uint64_t>(cfg.q, 0)));
  }

  Rng rng(opt.seed);
  for (int f = 0; f < cfg.m; ++f) {
    for (std::uint64_t s = 0; s < opt.sessions; ++s) {
      const SessionPlan plan = realize_plan(sts[f], rng, opt.unpadded_payload);
      std::vector<int> t_of(cfg.n, 0);
      std::vector<Fnv1a> hash(cfg.n);
      for (const auto& per_sub : plan.queries) {
        for (const auto& [node, qv] : per_sub) {
          const int t = t_of[node]++;
          for (int c = 0; c < len; ++c) {
            const std::uint32_t v = qv.coeffs[c].value();
            ++counts[f][node][t][c][v];
            hash[node].update(v);
          }
        }
      }
      for (int node = 0; node < cfg.n; ++node)
        if (recv[node] > 0) ++joint[f][node][hash[node].state % opt.hash_bins];
    }
  }

  std::uint64_t total_tests = 0;
  for (int node = 0; node < cfg.n; ++node)
    if (recv[node] > 0)
      total_tests += static_cast<std::uint64_t>(cfg.m) * (cfg.m - 1) / 2 *
                     (static_cast<std::uint64_t>(recv[node]) * len + 1);
  const double threshold = total_tests ? opt.significance / total_tests : 0.0;

  auto empirical_tv = [](const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    double n1 = 0, n2 = 0, sum = 0;
    for (auto v : a) n1 += static_cast<double>(v);
    for (auto v : b) n2 += static_cast<double>(v);
    for (std::size_t i = 0; i < a.size(); ++i)
      sum += std::fabs(static_cast<double>(a[i]) / n1 - static_cast<double>(b[i]) / n2);
    return 0.5 * sum;
  };

  AuditReport report;
  report.all_pass = true;
  for (int node = 0; node < cfg.n; ++node) {
    NodeAudit na;
    na.node = node;
    na.method = "sampled";
    na.pass = true;
    for (int f1 = 0; f1 < cfg.m; ++f1)
      for (int f2 = f1 + 1; f2 < cfg.m; ++f2) {
        ++na.pairs_compared;
        if (recv[node] == 0) continue;
        for (int t = 0; t < recv[node]; ++t)
          for (int c = 0; c < len; ++c) {
            const auto res = two_sample_chisq(counts[f1][node][t][c], counts[f2][node][t][c]);
            if (res.p_value < threshold) na.pass = false;
            na.max_tv = std::max(na.max_tv,
                                 empirical_tv(counts[f1][node][t][c], counts[f2][node][t][c]));
          }
        const auto res = two_sample_chisq(joint[f1][node], joint[f2][node]);
        if (res.p_value < threshold) na.pass = false;
        na.max_tv = std::max(na.max_tv, empirical_tv(joint[f1][node], joint[f2][node]));
      }
    report.all_pass = report.all_pass && na.pass;
    report.nodes.push_back(na);
  }
  return report;
}

}  // namespace pirsim

#endif  // PIRSIM_PRIVACY_HPP_
