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

#ifndef PIRSIM_TESTS_SUPPORT_TEST_UTIL_HPP_
#define PIRSIM_TESTS_SUPPORT_TEST_UTIL_HPP_

#include <cstdint>
#include <vector>

#include "pirsim/field.hpp"

namespace pirsim_test {

inline pirsim::FieldElement fe(std::uint64_t v, std::uint32_t q) {
  return pirsim::FieldElement(v, q);
}

/// Scalar (ell = 1) data symbol.
inline pirsim::ExtSymbol sym1(std::uint64_t v, std::uint32_t q) {
  return pirsim::ExtSymbol({fe(v, q)});
}

inline pirsim::FieldMatrix matrix_from(const std::vector<std::vector<int>>& rows,
                                       std::uint32_t q) {
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows.front().size()) : 0;
  pirsim::FieldMatrix m(r, c, q);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.at(i, j) = fe(rows[i][j], q);
  return m;
}

}  // namespace pirsim_test

#endif  // PIRSIM_TESTS_SUPPORT_TEST_UTIL_HPP_
