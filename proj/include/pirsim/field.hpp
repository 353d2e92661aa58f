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

#ifndef PIRSIM_FIELD_HPP_
#define PIRSIM_FIELD_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pirsim {

inline bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

/// An element of the prime field GF(q). The modulus travels with the value;
/// mixing moduli in one expression is an error, not a silent coercion.
class FieldElement {
 public:
  FieldElement() = default;

  FieldElement(std::uint64_t value, std::uint32_t modulus) : modulus_(modulus) {
    if (modulus_ < 2) throw std::invalid_argument("FieldElement: modulus must be >= 2");
    value_ = static_cast<std::uint32_t>(value % modulus_);
  }

  static FieldElement zero(std::uint32_t q) { return FieldElement(0, q); }
  static FieldElement one(std::uint32_t q) { return FieldElement(1, q); }

  std::uint32_t value() const { return value_; }
  std::uint32_t modulus() const { return modulus_; }
  bool is_zero() const { return value_ == 0; }

  FieldElement operator+(const FieldElement& o) const {
    check_same_modulus(o);
    return FieldElement((std::uint64_t)value_ + o.value_, modulus_);
  }
  FieldElement operator-(const FieldElement& o) const {
    check_same_modulus(o);
    return FieldElement((std::uint64_t)value_ + modulus_ - o.value_, modulus_);
  }
  FieldElement operator-() const { return FieldElement((std::uint64_t)modulus_ - value_, modulus_); }
  FieldElement operator*(const FieldElement& o) const {
    check_same_modulus(o);
    return FieldElement((std::uint64_t)value_ * o.value_, modulus_);
  }
  FieldElement operator/(const FieldElement& o) const { return *this * o.inverse(); }

  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  /// Multiplicative inverse by Fermat exponentiation; q is prime.
  FieldElement inverse() const {
    if (value_ == 0) throw std::domain_error("FieldElement: inverse of zero");
    return pow(modulus_ - 2);
  }

  FieldElement pow(std::uint64_t e) const {
    FieldElement acc = one(modulus_);
    FieldElement base = *this;
    while (e > 0) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }

  bool operator==(const FieldElement& o) const {
    return value_ == o.value_ && modulus_ == o.modulus_;
  }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }
  bool operator<(const FieldElement& o) const {
    return modulus_ != o.modulus_ ? modulus_ < o.modulus_ : value_ < o.value_;
  }

 private:
  void check_same_modulus(const FieldElement& o) const {
    if (modulus_ != o.modulus_ || modulus_ == 0)
      throw std::invalid_argument("FieldElement: modulus mismatch");
  }

  std::uint32_t value_ = 0;
  std::uint32_t modulus_ = 0;
};

/// A data symbol of GF(q^ell) held as its length-ell coordinate vector over
/// GF(q). Everything the protocol does to data is GF(q)-linear, so addition
/// and scaling by GF(q) elements are the only operations ever needed.
class ExtSymbol {
 public:
  ExtSymbol() = default;
  explicit ExtSymbol(std::vector<FieldElement> coords) : coords_(std::move(coords)) {}

  static ExtSymbol zero(int ell, std::uint32_t q) {
    return ExtSymbol(std::vector<FieldElement>(ell, FieldElement::zero(q)));
  }

  int ell() const { return static_cast<int>(coords_.size()); }
  const std::vector<FieldElement>& coords() const { return coords_; }
  const FieldElement& coord(int i) const { return coords_.at(i); }
  FieldElement& coord(int i) { return coords_.at(i); }

  bool is_zero() const {
    for (const auto& c : coords_)
      if (!c.is_zero()) return false;
    return true;
  }

  ExtSymbol operator+(const ExtSymbol& o) const {
    if (coords_.size() != o.coords_.size())
      throw std::invalid_argument("ExtSymbol: length mismatch");
    ExtSymbol r = *this;
    for (std::size_t i = 0; i < coords_.size(); ++i) r.coords_[i] += o.coords_[i];
    return r;
  }
  ExtSymbol operator-(const ExtSymbol& o) const {
    if (coords_.size() != o.coords_.size())
      throw std::invalid_argument("ExtSymbol: length mismatch");
    ExtSymbol r = *this;
    for (std::size_t i = 0; i < coords_.size(); ++i) r.coords_[i] -= o.coords_[i];
    return r;
  }
  ExtSymbol& operator+=(const ExtSymbol& o) { return *this = *this + o; }

  /// Coordinatewise scaling by a GF(q) element.
  friend ExtSymbol operator*(const FieldElement& s, const ExtSymbol& x) {
    ExtSymbol r = x;
    for (auto& c : r.coords_) c = s * c;
    return r;
  }

  bool operator==(const ExtSymbol& o) const { return coords_ == o.coords_; }
  bool operator!=(const ExtSymbol& o) const { return !(*this == o); }

 private:
  std::vector<FieldElement> coords_;
};

/// Dense row-major matrix over one prime field.
class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(int rows, int cols, std::uint32_t q)
      : rows_(rows), cols_(cols), q_(q), data_((std::size_t)rows * cols, FieldElement::zero(q)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("FieldMatrix: negative dimension");
  }

  static FieldMatrix identity(int n, std::uint32_t q) {
    FieldMatrix m(n, n, q);
    for (int i = 0; i < n; ++i) m.at(i, i) = FieldElement::one(q);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::uint32_t modulus() const { return q_; }

  FieldElement& at(int r, int c) { return data_.at(index(r, c)); }
  const FieldElement& at(int r, int c) const { return data_.at(index(r, c)); }

  FieldMatrix transposed() const {
    FieldMatrix t(cols_, rows_, q_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
    return t;
  }

  FieldMatrix operator*(const FieldMatrix& o) const {
    if (cols_ != o.rows_ || q_ != o.q_) throw std::invalid_argument("FieldMatrix: shape mismatch");
    FieldMatrix p(rows_, o.cols_, q_);
    for (int r = 0; r < rows_; ++r)
      for (int i = 0; i < cols_; ++i) {
        if (at(r, i).is_zero()) continue;
        for (int c = 0; c < o.cols_; ++c) p.at(r, c) += at(r, i) * o.at(i, c);
      }
    return p;
  }

  bool operator==(const FieldMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  /// Columns selected by `cols`, in the given order.
  FieldMatrix select_columns(const std::vector<int>& cols) const {
    FieldMatrix s(rows_, static_cast<int>(cols.size()), q_);
    for (int r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < cols.size(); ++j) s.at(r, (int)j) = at(r, cols[j]);
    return s;
  }

 private:
  std::size_t index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("FieldMatrix index");
    return (std::size_t)r * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::uint32_t q_ = 2;
  std::vector<FieldElement> data_;
};

/// Result of reducing [A | y] to reduced row echelon form. An unknown is
/// `determined` when its pivot row carries no free-column coefficient, i.e.
/// its value does not depend on any free variable.
struct LinearSolveResult {
  bool consistent = true;
  int rank = 0;
  std::vector<int> pivot_columns;
  std::vector<int> free_columns;
  std::vector<bool> determined;
  std::vector<ExtSymbol> values;  // meaningful where determined[i] is true
};

namespace detail {

// In-place RREF over GF(q) with the same row operations mirrored onto the
// right-hand sides (each an ExtSymbol, eliminated coordinatewise).
inline void rref_inplace(FieldMatrix& a, std::vector<ExtSymbol>& y, std::vector<int>& pivots) {
  const int rows = a.rows(), cols = a.cols();
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int pivot = -1;
    for (int r = row; r < rows; ++r) {
      if (!a.at(r, col).is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != row) {
      for (int c = 0; c < cols; ++c) std::swap(a.at(pivot, c), a.at(row, c));
      std::swap(y[pivot], y[row]);
    }
    const FieldElement inv = a.at(row, col).inverse();
    for (int c = 0; c < cols; ++c) a.at(row, c) = inv * a.at(row, c);
    y[row] = inv * y[row];
    for (int r = 0; r < rows; ++r) {
      if (r == row || a.at(r, col).is_zero()) continue;
      const FieldElement factor = a.at(r, col);
      for (int c = 0; c < cols; ++c) a.at(r, c) -= factor * a.at(row, c);
      y[r] = y[r] - factor * y[row];
    }
    pivots.push_back(col);
    ++row;
  }
}

}  // namespace detail

/// Solve A x = y over GF(q), with y given as ExtSymbol entries (each solved
/// coordinatewise over its ell coordinates). Reports which unknowns are
/// uniquely determined even when the system as a whole is underdetermined.
inline LinearSolveResult gaussian_solve(const FieldMatrix& a_in, const std::vector<ExtSymbol>& y_in) {
  if ((int)y_in.size() != a_in.rows())
    throw std::invalid_argument("gaussian_solve: rhs length mismatch");
  const int ell = y_in.empty() ? 1 : y_in.front().ell();
  for (const auto& s : y_in)
    if (s.ell() != ell) throw std::invalid_argument("gaussian_solve: inconsistent rhs widths");

  FieldMatrix a = a_in;
  std::vector<ExtSymbol> y = y_in;
  LinearSolveResult res;
  detail::rref_inplace(a, y, res.pivot_columns);
  res.rank = static_cast<int>(res.pivot_columns.size());

  for (int r = res.rank; r < a.rows(); ++r) {
    if (!y[r].is_zero()) {
      res.consistent = false;
      return res;
    }
  }

  std::vector<bool> is_pivot(a.cols(), false);
  for (int c : res.pivot_columns) is_pivot[c] = true;
  for (int c = 0; c < a.cols(); ++c)
    if (!is_pivot[c]) res.free_columns.push_back(c);

  res.determined.assign(a.cols(), false);
  res.values.assign(a.cols(), ExtSymbol::zero(ell, a_in.modulus()));
  for (int r = 0; r < res.rank; ++r) {
    const int p = res.pivot_columns[r];
    bool pinned = true;
    for (int c : res.free_columns) {
      if (!a.at(r, c).is_zero()) {
        pinned = false;
        break;
      }
    }
    if (pinned) {
      res.determined[p] = true;
      res.values[p] = y[r];
    }
  }
  return res;
}

/// Row rank over GF(q).
inline int rank_of(const FieldMatrix& a) {
  FieldMatrix m = a;
  std::vector<ExtSymbol> y(a.rows(), ExtSymbol::zero(1, a.modulus()));
  std::vector<int> pivots;
  detail::rref_inplace(m, y, pivots);
  return static_cast<int>(pivots.size());
}

/// Inverse of a square matrix; throws std::domain_error when singular.
inline FieldMatrix inverse_of(const FieldMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse_of: matrix not square");
  const int n = a.rows();
  FieldMatrix m = a;
  // Carry the identity columns as ell = n right-hand sides.
  std::vector<ExtSymbol> rhs;
  rhs.reserve(n);
  for (int r = 0; r < n; ++r) {
    std::vector<FieldElement> row(n, FieldElement::zero(a.modulus()));
    row[r] = FieldElement::one(a.modulus());
    rhs.emplace_back(std::move(row));
  }
  std::vector<int> pivots;
  detail::rref_inplace(m, rhs, pivots);
  if ((int)pivots.size() != n) throw std::domain_error("inverse_of: singular matrix");
  FieldMatrix inv(n, n, a.modulus());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) inv.at(r, c) = rhs[r].coord(c);
  return inv;
}

}  // namespace pirsim

#endif  // PIRSIM_FIELD_HPP_
