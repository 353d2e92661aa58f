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

#ifndef PIRSIM_RNG_HPP_
#define PIRSIM_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

#include "pirsim/field.hpp"

namespace pirsim {

/// Deterministic random source. Only mt19937_64 raw output is consumed and
/// all derived draws are computed here by rejection or inversion, because the
/// standard distribution adaptors are implementation-defined and would break
/// cross-toolchain reproducibility of transcripts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform integer in [0, bound) without modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng: zero bound");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  FieldElement uniform_field(std::uint32_t q) {
    return FieldElement(uniform_below(q), q);
  }

  ExtSymbol uniform_symbol(int ell, std::uint32_t q) {
    std::vector<FieldElement> coords;
    coords.reserve(ell);
    for (int i = 0; i < ell; ++i) coords.push_back(uniform_field(q));
    return ExtSymbol(std::move(coords));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Exponential with the given mean, by inversion.
  double exponential(double mean) {
    return -mean * std::log1p(-uniform01());
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pirsim

#endif  // PIRSIM_RNG_HPP_
