#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hermitian.hpp"

namespace ritzlab {

// ---------------------------------------------------------------------------
// Finitely supported coordinate vector over a countable computational basis.
//
// Canonical form is enforced on construction: entries sorted by strictly
// increasing index, duplicate indices summed, entries with magnitude below
// 1e-300 dropped (so "stored zero" cannot leak in through cancellation), and
// every value finite.  All trial vectors, constraints and family members in
// the library are CoefficientVectors; only operator models know what the
// basis means.
// ---------------------------------------------------------------------------

class CoefficientVector {
 public:
  struct Entry {
    int index;
    Complex value;
    bool operator==(const Entry& o) const { return index == o.index && value == o.value; }
  };

  CoefficientVector() = default;

  explicit CoefficientVector(std::vector<Entry> entries) {
    canonicalize(std::move(entries));
  }

  CoefficientVector(std::initializer_list<Entry> entries)
      : CoefficientVector(std::vector<Entry>(entries)) {}

  // Unit basis vector e_index.
  static CoefficientVector unit(int index) {
    return CoefficientVector({{index, Complex(1.0, 0.0)}});
  }

  // Coordinates values[i] on indices 0..values.size()-1.
  static CoefficientVector from_dense(const std::vector<Complex>& values) {
    std::vector<Entry> e;
    e.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      e.push_back({static_cast<int>(i), values[i]});
    return CoefficientVector(std::move(e));
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  int max_index() const { return entries_.empty() ? -1 : entries_.back().index; }

  // Coordinate at `index`, zero when unstored (binary search).
  Complex at(int index) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const Entry& e, int i) { return e.index < i; });
    if (it != entries_.end() && it->index == index) return it->value;
    return Complex(0.0, 0.0);
  }

  CoefficientVector scaled(Complex factor) const {
    std::vector<Entry> e = entries_;
    for (Entry& x : e) x.value *= factor;
    return CoefficientVector(std::move(e));
  }

  // this + factor * other.
  CoefficientVector plus_scaled(const CoefficientVector& other, Complex factor) const {
    std::vector<Entry> e;
    e.reserve(entries_.size() + other.entries_.size());
    e.insert(e.end(), entries_.begin(), entries_.end());
    for (const Entry& x : other.entries_) e.push_back({x.index, factor * x.value});
    return CoefficientVector(std::move(e));
  }

  // Dense coordinates 0..dim-1; indices beyond dim are an error.
  std::vector<Complex> densify(int dim) const {
    if (max_index() >= dim)
      throw IndexOutOfRange("coordinate index " + std::to_string(max_index()) +
                            " outside dimension " + std::to_string(dim));
    std::vector<Complex> out(dim, Complex(0.0, 0.0));
    for (const Entry& e : entries_) out[e.index] = e.value;
    return out;
  }

  bool operator==(const CoefficientVector& o) const { return entries_ == o.entries_; }

 private:
  void canonicalize(std::vector<Entry> e) {
    for (const Entry& x : e) {
      if (x.index < 0)
        throw IndexOutOfRange("negative coordinate index " + std::to_string(x.index));
      if (!is_finite(x.value)) throw Error("non-finite coordinate value");
    }
    std::stable_sort(e.begin(), e.end(),
                     [](const Entry& a, const Entry& b) { return a.index < b.index; });
    entries_.clear();
    entries_.reserve(e.size());
    for (const Entry& x : e) {
      if (!entries_.empty() && entries_.back().index == x.index)
        entries_.back().value += x.value;
      else
        entries_.push_back(x);
    }
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [](const Entry& x) { return std::abs(x.value) < 1e-300; }),
                   entries_.end());
    for (const Entry& x : entries_)
      if (!is_finite(x.value)) throw Error("non-finite coordinate value");
  }

  std::vector<Entry> entries_;
};

// Plain coefficient-space inner product, conjugate-linear in the first slot.
// Operator models with a Euclidean/l2 computational basis use this directly;
// it is also the basis-intrinsic notion used when pruning pooled bases.
inline Complex l2_inner(const CoefficientVector& x, const CoefficientVector& y) {
  Complex s(0.0, 0.0);
  auto ix = x.entries().begin();
  auto iy = y.entries().begin();
  while (ix != x.entries().end() && iy != y.entries().end()) {
    if (ix->index < iy->index) {
      ++ix;
    } else if (iy->index < ix->index) {
      ++iy;
    } else {
      s += std::conj(ix->value) * iy->value;
      ++ix;
      ++iy;
    }
  }
  return s;
}

inline double l2_norm(const CoefficientVector& x) {
  double s = 0.0;
  for (const auto& e : x.entries()) s += std::norm(e.value);
  return std::sqrt(s);
}

}  // namespace ritzlab
