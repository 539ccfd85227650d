#pragma once

#include <algorithm>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "coefficient_vector.hpp"
#include "errors.hpp"
#include "hermitian.hpp"
#include "operator_model.hpp"

namespace ritzlab {

// A trial basis is an ordered list of finitely supported vectors.  Order
// matters: Gram/form rows follow it, and degeneracy reports name positions.
using TrialBasis = std::vector<CoefficientVector>;

namespace detail {

// Fill an m x m Hermitian matrix whose (i, j) upper-triangle entries are
// independent pure evaluations.  Work is split over threads by entry; every
// entry is computed from the same inputs and written to its own slot, so the
// result is bitwise identical for any thread count.
template <typename Entry>
HermitianMatrix assemble_hermitian(int m, Entry entry, int threads) {
  std::vector<std::pair<int, int>> slots;
  slots.reserve(static_cast<std::size_t>(m) * (m + 1) / 2);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) slots.emplace_back(i, j);

  std::vector<Complex> upper(slots.size());
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(slots.size())));
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s)
      upper[s] = entry(slots[s].first, slots[s].second);
  };
  if (workers == 1) {
    run_range(0, slots.size());
  } else {
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (slots.size() + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      const std::size_t begin = std::min(slots.size(), t * chunk);
      const std::size_t end = std::min(slots.size(), begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
  }

  HermitianMatrix out(m);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto [i, j] = slots[s];
    Complex v = upper[s];
    if (i == j) v = Complex(v.real(), 0.0);  // sesquilinear forms are real on the diagonal
    out.set(i, j, v);
  }
  return out;
}

}  // namespace detail

// Gram matrix G_ij = inner(basis[i], basis[j]).
inline HermitianMatrix assemble_gram(const TrialBasis& basis, const OperatorModel& op,
                                     int threads = 1) {
  if (basis.empty()) throw EmptyBasis();
  return detail::assemble_hermitian(
      static_cast<int>(basis.size()),
      [&](int i, int j) { return op.inner(basis[i], basis[j]); }, threads);
}

// Form matrix H_ij = form(basis[i], basis[j]).
inline HermitianMatrix assemble_form_matrix(const TrialBasis& basis,
                                            const OperatorModel& op, int threads = 1) {
  if (basis.empty()) throw EmptyBasis();
  return detail::assemble_hermitian(
      static_cast<int>(basis.size()),
      [&](int i, int j) { return op.form(basis[i], basis[j]); }, threads);
}

// Result of the projected eigenproblem H c = theta G c on a trial basis.
// values are ascending; vectors holds the coefficient columns, normalized so
// that c^H G c = 1.  gram_condition tracks how close the basis is to
// dependence; residual is the worst pencil residual of the small solve.
struct RitzSpectrum {
  std::vector<double> values;
  ComplexMatrix vectors;
  double gram_condition = 0.0;
  double residual = 0.0;
};

inline RitzSpectrum ritz_spectrum(const TrialBasis& basis, const OperatorModel& op,
                                  int threads = 1) {
  const HermitianMatrix g = assemble_gram(basis, op, threads);
  const HermitianMatrix h = assemble_form_matrix(basis, op, threads);
  RitzSpectrum out;
  try {
    EigenDecomposition eig = eigen_generalized(h, g);
    out.values = std::move(eig.values);
    out.vectors = std::move(eig.vectors);
    out.residual = eig.residual;
  } catch (const NotPositiveDefinite& e) {
    // A failed Gram pivot means the trial vectors are (numerically) linearly
    // dependent; report the offending position, 1-based like all user-facing
    // vector numbering.
    throw GramDegenerate(e.pivot_index + 1);
  }
  out.gram_condition = condition_estimate(g);
  return out;
}

// Assemble the Ritz vector for column `col` back in ambient coordinates.
inline CoefficientVector expand_combination(const TrialBasis& basis,
                                            const ComplexMatrix& vectors, int col) {
  if (basis.empty()) throw EmptyBasis();
  if (vectors.rows() != static_cast<int>(basis.size()))
    throw DimensionMismatch("coefficient rows do not match basis size");
  if (col < 0 || col >= vectors.cols())
    throw IndexOutOfRange("combination column " + std::to_string(col));
  CoefficientVector out;
  for (int j = 0; j < vectors.rows(); ++j)
    out = out.plus_scaled(basis[j], vectors(j, col));
  return out;
}

// ---------------------------------------------------------------------------
// Nested-space monotonicity: whenever one trial basis extends another, every
// projected value may only move down (new directions can only help each
// minimum).  The chain must be literally nested -- each basis a prefix of the
// next -- otherwise the comparison is meaningless and refused.
// ---------------------------------------------------------------------------

struct MonotonicityReport {
  std::vector<std::vector<double>> values;  // one ascending list per basis
  std::vector<bool> step_ok;                // values[s+1] <= values[s] rankwise
  bool all_ok = true;
};

inline MonotonicityReport nested_monotonicity_check(const std::vector<TrialBasis>& chain,
                                                    const OperatorModel& op,
                                                    int threads = 1) {
  if (chain.empty()) throw EmptyBasis();
  for (std::size_t s = 0; s + 1 < chain.size(); ++s) {
    const TrialBasis& small = chain[s];
    const TrialBasis& large = chain[s + 1];
    if (small.size() > large.size())
      throw Unsupported("basis chain is not nested: step " + std::to_string(s + 1) +
                        " shrinks");
    for (std::size_t j = 0; j < small.size(); ++j)
      if (!(small[j] == large[j]))
        throw Unsupported("basis chain is not nested: step " + std::to_string(s + 1) +
                          " is not a prefix of step " + std::to_string(s + 2));
  }

  MonotonicityReport report;
  for (const TrialBasis& basis : chain)
    report.values.push_back(ritz_spectrum(basis, op, threads).values);
  for (std::size_t s = 0; s + 1 < report.values.size(); ++s) {
    const auto& prev = report.values[s];
    const auto& next = report.values[s + 1];
    bool ok = true;
    for (std::size_t k = 0; k < prev.size(); ++k) {
      const double slack = 1e-10 * std::max(1.0, std::abs(prev[k]));
      if (next[k] > prev[k] + slack) ok = false;
    }
    report.step_ok.push_back(ok);
    report.all_ok = report.all_ok && ok;
  }
  return report;
}

}  // namespace ritzlab
