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

#ifndef PIRSIM_STATS_HPP_
#define PIRSIM_STATS_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pirsim {

namespace detail {

// Lower regularized incomplete gamma by power series; converges fast for
// x < a + 1.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by Lentz's continued fraction;
// converges fast for x >= a + 1.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int n = 1; n < 1000; ++n) {
    const double an = -n * (n - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Lower regularized incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("regularized_gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_cf(a, x);
}

/// Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x).
inline double regularized_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

/// Chi-square survival function: P(X >= x) for df degrees of freedom.
inline double chisq_sf(double x, int df) {
  if (df <= 0) throw std::invalid_argument("chisq_sf: df must be positive");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

/// Two-sample chi-square homogeneity test over shared bins. Bins empty in
/// both samples are dropped; df = nonempty bins - 1. A degenerate df <= 0
/// (one shared nonempty bin) yields p = 1.
inline ChiSquareResult two_sample_chisq(const std::vector<std::uint64_t>& o1,
                                        const std::vector<std::uint64_t>& o2) {
  if (o1.size() != o2.size()) throw std::invalid_argument("two_sample_chisq: bin count mismatch");
  double n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < o1.size(); ++i) {
    n1 += static_cast<double>(o1[i]);
    n2 += static_cast<double>(o2[i]);
  }
  if (n1 == 0.0 || n2 == 0.0) throw std::invalid_argument("two_sample_chisq: empty sample");
  const double k1 = std::sqrt(n2 / n1);
  const double k2 = std::sqrt(n1 / n2);
  ChiSquareResult res;
  int nonempty = 0;
  for (std::size_t i = 0; i < o1.size(); ++i) {
    const double tot = static_cast<double>(o1[i]) + static_cast<double>(o2[i]);
    if (tot == 0.0) continue;
    ++nonempty;
    const double diff = k1 * static_cast<double>(o1[i]) - k2 * static_cast<double>(o2[i]);
    res.statistic += diff * diff / tot;
  }
  res.df = nonempty - 1;
  res.p_value = res.df > 0 ? chisq_sf(res.statistic, res.df) : 1.0;
  return res;
}

/// FNV-1a over explicit 64-bit words; platform-stable, used only to fold
/// high-dimensional query sequences into hash bins for joint testing.
struct Fnv1a {
  std::uint64_t state = 1469598103934665603ull;

  void update(std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      state ^= (word >> (8 * i)) & 0xffu;
      state *= 1099511628211ull;
    }
  }
};

}  // namespace pirsim

#endif  // PIRSIM_STATS_HPP_
