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

#ifndef PIRSIM_MDS_HPP_
#define PIRSIM_MDS_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pirsim/field.hpp"
#include "pirsim/rng.hpp"

namespace pirsim {

/// Systematic (n, k) MDS code over GF(q). Node indices are 0-based: nodes
/// 0..k-1 are systematic, nodes k..n-1 hold parities.
struct MdsCode {
  int n = 0;
  int k = 0;
  std::uint32_t q = 2;
  FieldMatrix generator;  // k x n, left block is the identity
};

/// True when every k-subset of columns of `g` is invertible, i.e. any k nodes
/// suffice to rebuild the data.
inline bool is_mds(const FieldMatrix& g) {
  const int k = g.rows(), n = g.cols();
  if (k > n) return false;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    if (rank_of(g.select_columns(pick)) != k) return false;
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) return true;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

/// Build [I_k | V] with V[b][j] = (j+1)^b. The parity evaluation points
/// 1..n-k must be distinct and nonzero, hence the q >= n-k+1 precondition.
/// The Vandermonde block does not guarantee the MDS property on its own
/// (over small fields some k x k minors can vanish), so it is checked
/// exhaustively and construction fails rather than hand back a weaker code.
inline MdsCode make_mds_code(int n, int k, std::uint32_t q) {
  if (k < 1 || n <= k) throw std::invalid_argument("make_mds_code: need n > k >= 1");
  if (!is_prime(q)) throw std::invalid_argument("make_mds_code: q must be prime");
  if (q < static_cast<std::uint32_t>(n - k + 1))
    throw std::invalid_argument("make_mds_code: q must be at least n-k+1");
  MdsCode code;
  code.n = n;
  code.k = k;
  code.q = q;
  code.generator = FieldMatrix(k, n, q);
  for (int b = 0; b < k; ++b) {
    code.generator.at(b, b) = FieldElement::one(q);
    for (int j = 0; j < n - k; ++j)
      code.generator.at(b, k + j) = FieldElement(j + 1, q).pow(b);
  }
  if (!is_mds(code.generator))
    throw std::invalid_argument("make_mds_code: generator is not MDS over GF(" +
                                std::to_string(q) + "), use a larger field");
  return code;
}

/// Smallest prime q for which make_mds_code(n, k, q) succeeds.
inline std::uint32_t smallest_mds_prime(int n, int k) {
  for (std::uint32_t q = 2;; ++q) {
    if (!is_prime(q) || q < static_cast<std::uint32_t>(n - k + 1)) continue;
    try {
      make_mds_code(n, k, q);
      return q;
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
}

/// One file held as a k x alpha grid of data symbols: row b is the slice
/// stored (in coded form) across the nodes, column t is a stripe.
struct FileData {
  int rows = 0;
  int cols = 0;
  std::vector<ExtSymbol> cells;  // row-major

  FileData() = default;
  FileData(int r, int c, int ell, std::uint32_t q)
      : rows(r), cols(c), cells((std::size_t)r * c, ExtSymbol::zero(ell, q)) {}

  ExtSymbol& at(int r, int c) { return cells.at((std::size_t)r * cols + c); }
  const ExtSymbol& at(int r, int c) const { return cells.at((std::size_t)r * cols + c); }

  bool operator==(const FileData& o) const {
    return rows == o.rows && cols == o.cols && cells == o.cells;
  }
};

/// The coded system: m files of shape k x alpha, plus the n node shares.
/// Share position (f, t) lives at index f * alpha + t and holds
/// sum_b G[b][node] * X_f[b][t].
struct StorageSystem {
  MdsCode code;
  int ell = 1;
  int m = 0;
  int alpha = 0;
  std::vector<FileData> files;
  std::vector<std::vector<ExtSymbol>> shares;  // n entries of length m * alpha

  int positions() const { return m * alpha; }
  int position_of(int f, int t) const { return f * alpha + t; }
};

inline StorageSystem encode_storage(const MdsCode& code, int ell, int alpha,
                                    const std::vector<FileData>& files) {
  for (const auto& f : files) {
    if (f.rows != code.k || f.cols != alpha)
      throw std::invalid_argument("encode_storage: file shape must be k x alpha");
    for (const auto& cell : f.cells) {
      if (cell.ell() != ell) throw std::invalid_argument("encode_storage: symbol width mismatch");
      for (const auto& c : cell.coords())
        if (c.modulus() != code.q) throw std::invalid_argument("encode_storage: field mismatch");
    }
  }
  StorageSystem sys;
  sys.code = code;
  sys.ell = ell;
  sys.m = static_cast<int>(files.size());
  sys.alpha = alpha;
  sys.files = files;
  sys.shares.assign(code.n, {});
  for (int j = 0; j < code.n; ++j) {
    auto& share = sys.shares[j];
    share.reserve((std::size_t)sys.m * alpha);
    for (int f = 0; f < sys.m; ++f)
      for (int t = 0; t < alpha; ++t) {
        ExtSymbol acc = ExtSymbol::zero(ell, code.q);
        for (int b = 0; b < code.k; ++b) acc += code.generator.at(b, j) * files[f].at(b, t);
        share.push_back(acc);
      }
  }
  return sys;
}

inline StorageSystem random_storage(const MdsCode& code, int ell, int m, int alpha, Rng& rng) {
  std::vector<FileData> files;
  files.reserve(m);
  for (int f = 0; f < m; ++f) {
    FileData fd(code.k, alpha, ell, code.q);
    for (auto& cell : fd.cells) cell = rng.uniform_symbol(ell, code.q);
    files.push_back(std::move(fd));
  }
  return encode_storage(code, ell, alpha, files);
}

/// Rebuild every file from the shares of the given k nodes.
inline std::vector<FileData> reconstruct_files(const StorageSystem& sys,
                                               const std::vector<int>& nodes) {
  if ((int)nodes.size() != sys.code.k)
    throw std::invalid_argument("reconstruct_files: need exactly k nodes");
  // Row r of the local system reads sum_b G[b][nodes[r]] * X[b] = share_r.
  FieldMatrix m(sys.code.k, sys.code.k, sys.code.q);
  for (int r = 0; r < sys.code.k; ++r)
    for (int b = 0; b < sys.code.k; ++b) m.at(r, b) = sys.code.generator.at(b, nodes[r]);
  const FieldMatrix inv = inverse_of(m);

  std::vector<FileData> out;
  out.reserve(sys.m);
  for (int f = 0; f < sys.m; ++f) {
    FileData fd(sys.code.k, sys.alpha, sys.ell, sys.code.q);
    for (int t = 0; t < sys.alpha; ++t) {
      for (int b = 0; b < sys.code.k; ++b) {
        ExtSymbol acc = ExtSymbol::zero(sys.ell, sys.code.q);
        for (int r = 0; r < sys.code.k; ++r)
          acc += inv.at(b, r) * sys.shares[nodes[r]][sys.position_of(f, t)];
        fd.at(b, t) = acc;
      }
    }
    out.push_back(std::move(fd));
  }
  return out;
}

/// A node's answer to one coefficient vector: the GF(q)-linear combination of
/// its m * alpha stored symbols.
inline ExtSymbol respond(const std::vector<ExtSymbol>& share,
                         const std::vector<FieldElement>& coeffs) {
  if (share.size() != coeffs.size()) throw std::invalid_argument("respond: length mismatch");
  if (share.empty()) throw std::invalid_argument("respond: empty share");
  ExtSymbol acc = ExtSymbol::zero(share.front().ell(), share.front().coord(0).modulus());
  for (std::size_t i = 0; i < share.size(); ++i) {
    if (coeffs[i].is_zero()) continue;
    acc += coeffs[i] * share[i];
  }
  return acc;
}

}  // namespace pirsim

#endif  // PIRSIM_MDS_HPP_
