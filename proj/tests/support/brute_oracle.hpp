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

#ifndef PIRSIM_TESTS_SUPPORT_BRUTE_ORACLE_HPP_
#define PIRSIM_TESTS_SUPPORT_BRUTE_ORACLE_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pirsim/decoder.hpp"
#include "pirsim/field.hpp"
#include "pirsim/mds.hpp"

namespace pirsim_test {

struct OracleResult {
  int consistent_candidates = 0;
  pirsim::FileData file;  // the unique candidate when the count is 1
};

// Reference decoder that ignores all linear-algebra shortcuts: enumerate
// every possible value of the target file and keep the candidates that some
// choice of pad interference could explain. A transcript pins the file down
// exactly when one candidate survives. Exponential in k*alpha, so only
// usable for tiny systems, and only for ell == 1.
inline OracleResult brute_force_decode(const pirsim::Transcript& tr,
                                       const pirsim::MdsCode& code,
                                       std::uint64_t candidate_cap = 1u << 22) {
  using pirsim::ExtSymbol;
  using pirsim::FieldElement;
  using pirsim::FieldMatrix;

  if (tr.config.ell != 1) throw std::logic_error("brute_force_decode: ell must be 1");
  const auto& st = tr.plan.structure;
  const int k = code.k;
  const int alpha = st.alpha;
  const std::uint32_t q = code.q;
  const int file_syms = k * alpha;

  std::uint64_t candidates = 1;
  for (int i = 0; i < file_syms; ++i) {
    candidates *= q;
    if (candidates > candidate_cap)
      throw std::logic_error("brute_force_decode: candidate space too large");
  }

  // Fixed part: interference columns and the recorded responses. The unit
  // contribution moves to the right-hand side per candidate.
  int rows = 0;
  for (const auto& per_sub : tr.responses) rows += static_cast<int>(per_sub.size());
  FieldMatrix pad_part(rows, k * st.pad_count(), q);
  std::vector<ExtSymbol> observed;
  observed.reserve(rows);
  struct UnitRef {
    int row;
    int stripe;
    int node;
  };
  std::vector<UnitRef> units;
  int row = 0;
  for (std::size_t s = 0; s < tr.responses.size(); ++s) {
    for (const auto& [node, resp] : tr.responses[s]) {
      const pirsim::QuerySpec& qs = tr.plan.queries.at(s).at(node).spec;
      for (int b = 0; b < k; ++b) {
        const FieldElement g = code.generator.at(b, node);
        pad_part.at(row, qs.fresh_pad * k + b) += g;
        if (qs.extra_pad >= 0) pad_part.at(row, qs.extra_pad * k + b) += g;
      }
      if (qs.unit_pos >= 0) {
        const int t = qs.unit_pos - st.file * alpha;
        if (t < 0 || t >= alpha)
          throw std::logic_error("brute_force_decode: unit outside the file window");
        units.push_back({row, t, node});
      }
      observed.push_back(resp);
      ++row;
    }
  }

  OracleResult out;
  out.file = pirsim::FileData(k, alpha, 1, q);
  std::vector<std::uint32_t> digits(file_syms, 0);  // digit i is symbol (t*k+b), i = t*k+b
  for (std::uint64_t c = 0; c < candidates; ++c) {
    std::vector<ExtSymbol> rhs = observed;
    for (const UnitRef& u : units) {
      FieldElement contrib = FieldElement::zero(q);
      for (int b = 0; b < k; ++b)
        contrib += code.generator.at(b, u.node) * FieldElement(digits[u.stripe * k + b], q);
      rhs[u.row] = rhs[u.row] - ExtSymbol({contrib});
    }
    const pirsim::LinearSolveResult res = pirsim::gaussian_solve(pad_part, rhs);
    if (res.consistent) {
      ++out.consistent_candidates;
      if (out.consistent_candidates == 1)
        for (int t = 0; t < alpha; ++t)
          for (int b = 0; b < k; ++b)
            out.file.at(b, t) = ExtSymbol({FieldElement(digits[t * k + b], q)});
    }
    for (int i = 0; i < file_syms; ++i) {  // odometer
      if (++digits[i] < q) break;
      digits[i] = 0;
    }
  }
  return out;
}

}  // namespace pirsim_test

#endif  // PIRSIM_TESTS_SUPPORT_BRUTE_ORACLE_HPP_
