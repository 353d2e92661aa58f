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

#ifndef PIRSIM_BASE_SCHEME_HPP_
#define PIRSIM_BASE_SCHEME_HPP_

#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "pirsim/field.hpp"

namespace pirsim {

/// Symbolic composition of one query vector, before pad values are drawn.
/// Every query carries the fresh pad of its subquery; compensation queries
/// add either one earlier pad or one unit position, never both.
struct QuerySpec {
  int fresh_pad = -1;
  int extra_pad = -1;  // earlier pad folded in, -1 when absent
  int unit_pos = -1;   // flat position file*alpha + stripe, -1 when absent

  bool pure() const { return extra_pad < 0 && unit_pos < 0; }

  std::vector<int> pads() const {
    std::vector<int> p{fresh_pad};
    if (extra_pad >= 0) p.push_back(extra_pad);
    return p;
  }

  bool operator==(const QuerySpec& o) const {
    return fresh_pad == o.fresh_pad && extra_pad == o.extra_pad && unit_pos == o.unit_pos;
  }
};

/// One subquery: a fresh pad index plus the per-node query compositions.
/// The map is keyed by 0-based node index; absent nodes receive nothing.
struct SubquerySpec {
  int pad = -1;
  std::map<int, QuerySpec> queries;

  bool operator==(const SubquerySpec& o) const { return pad == o.pad && queries == o.queries; }
};

/// Per-repetition dimensions of the non-robust scheme on an (n, k) code:
/// alpha_prime stripes are retrieved by d_prime subqueries.
struct BaseParams {
  int alpha_prime = 0;  // LCM(k, n-k) / k
  int d_prime = 0;      // LCM(k, n-k) / (n-k)
};

inline BaseParams base_params(int n, int k) {
  if (k < 1 || k >= n) throw std::invalid_argument("base_params: need 1 <= k < n");
  const int lcm = std::lcm(k, n - k);
  return BaseParams{lcm / k, lcm / (n - k)};
}

/// Node grouping for one subquery, writing n-k = beta*k + r with 0 <= r < k:
/// the k systematic nodes form group one (r payload slots, k-r pure), the
/// parities form beta full payload groups of k plus r trailing pure nodes.
struct GroupLayout {
  int n = 0;
  int k = 0;
  int beta = 0;
  int r = 0;

  int systematic_begin() const { return 0; }
  int parity_group_begin(int s) const { return k + s * k; }  // s in [0, beta)
  int leftover_begin() const { return k + beta * k; }
};

inline GroupLayout group_layout(int n, int k) {
  if (k < 1 || k >= n) throw std::invalid_argument("group_layout: need 1 <= k < n");
  GroupLayout gl;
  gl.n = n;
  gl.k = k;
  gl.beta = (n - k) / k;
  gl.r = (n - k) % k;
  return gl;
}

/// Build the d_prime subqueries of one repetition covering the alpha_prime
/// stripes starting at stripe_offset of file `file` (0-based), using fresh
/// pads pad_base .. pad_base + d_prime - 1.
///
/// In subquery j, the r payload slots of group one keep stripe indices
/// stripe_offset .. stripe_offset+r-1 but the carrying node rotates
/// downwards by j; parity group s asks for stripe offset + r + s*d' + j.
/// Each window stripe therefore collects exactly k payload equations from
/// k distinct nodes across the repetition, which requires every computed
/// stripe index to stay below alpha_prime; (n, k) shapes where the indices
/// overflow do not admit this layout and are rejected.
inline std::vector<SubquerySpec> base_subqueries(int n, int k, int m, int alpha, int file,
                                                 int stripe_offset, int pad_base) {
  const BaseParams bp = base_params(n, k);
  const GroupLayout gl = group_layout(n, k);
  if (file < 0 || file >= m) throw std::invalid_argument("base_subqueries: file out of range");
  if (stripe_offset < 0 || stripe_offset + bp.alpha_prime > alpha)
    throw std::invalid_argument("base_subqueries: stripe window exceeds alpha");
  if (bp.d_prime > k)
    throw std::domain_error("base_subqueries: more subqueries than rotation slots");

  auto stripe_checked = [&](int s) {
    if (s < 0 || s >= bp.alpha_prime)
      throw std::domain_error("base_subqueries: stripe index " + std::to_string(s + 1) +
                              " outside the " + std::to_string(bp.alpha_prime) +
                              "-stripe window; (" + std::to_string(n) + "," + std::to_string(k) +
                              ") does not admit this group layout");
    return file * alpha + stripe_offset + s;
  };

  std::vector<SubquerySpec> subs;
  subs.reserve(bp.d_prime);
  for (int j = 0; j < bp.d_prime; ++j) {
    SubquerySpec sq;
    sq.pad = pad_base + j;
    for (int p = 0; p < gl.r; ++p) {
      const int node = (p + j) % k;
      sq.queries[node] = QuerySpec{sq.pad, -1, stripe_checked(p)};
    }
    for (int v = 0; v < k; ++v) {
      if (!sq.queries.count(v)) sq.queries[v] = QuerySpec{sq.pad, -1, -1};
    }
    for (int s = 0; s < gl.beta; ++s) {
      const int pos = stripe_checked(gl.r + s * bp.d_prime + j);
      for (int v = gl.parity_group_begin(s); v < gl.parity_group_begin(s) + k; ++v)
        sq.queries[v] = QuerySpec{sq.pad, -1, pos};
    }
    for (int v = gl.leftover_begin(); v < n; ++v) sq.queries[v] = QuerySpec{sq.pad, -1, -1};
    subs.push_back(std::move(sq));
  }
  return subs;
}

}  // namespace pirsim

#endif  // PIRSIM_BASE_SCHEME_HPP_
