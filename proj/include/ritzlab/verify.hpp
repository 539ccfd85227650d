#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "convergence.hpp"
#include "errors.hpp"
#include "hermitian.hpp"
#include "minimax.hpp"
#include "operator_model.hpp"
#include "ritz.hpp"
#include "rng.hpp"

namespace ritzlab {

// ---------------------------------------------------------------------------
// Runtime self-verification.  Each suite draws seeded random cases and checks
// a property the library is supposed to guarantee.  The eigensolver suite
// deliberately re-derives eigenvalues by a second method (inertia counts plus
// bisection) that shares no code with the rotation-based solver, so a defect
// in the main path cannot silently vouch for itself.
// ---------------------------------------------------------------------------

struct VerifySuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
  bool ok = true;
  std::string repro;  // "seed=S suite=NAME case=T" for the first failure
};

namespace verify_detail {

// Number of negative pivots of a Hermitian matrix under symmetric
// elimination; by Sylvester's law this counts eigenvalues below zero.
inline int negative_pivots(std::vector<std::vector<Complex>> m) {
  const int d = static_cast<int>(m.size());
  int negatives = 0;
  for (int j = 0; j < d; ++j) {
    double pivot = m[j][j].real();
    if (std::abs(pivot) < 1e-300) pivot = (pivot < 0.0 ? -1e-300 : 1e-300);
    if (pivot < 0.0) ++negatives;
    for (int r = j + 1; r < d; ++r) {
      const Complex factor = m[r][j] / pivot;
      for (int c = j; c < d; ++c) m[r][c] -= factor * m[j][c];
    }
  }
  return negatives;
}

// Eigenvalues of the pencil (h, g) below the shift t.
inline int pencil_count_below(const HermitianMatrix& h, const HermitianMatrix& g,
                              double t) {
  const int d = h.dim();
  std::vector<std::vector<Complex>> m(d, std::vector<Complex>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[i][j] = h(i, j) - t * g(i, j);
  return negative_pivots(std::move(m));
}

// All pencil eigenvalues by expanding a bracket and bisecting each rank.
inline std::vector<double> pencil_eigenvalues_bisect(const HermitianMatrix& h,
                                                     const HermitianMatrix& g) {
  const int d = h.dim();
  double radius = 1.0;
  while (pencil_count_below(h, g, -radius) > 0 || pencil_count_below(h, g, radius) < d) {
    radius *= 2.0;
    if (radius > 1e15) throw Error("pencil bracket failed to close");
  }
  std::vector<double> values(d);
  for (int k = 1; k <= d; ++k) {
    double lo = -radius, hi = radius;
    for (int it = 0; it < 200; ++it) {
      const double span = hi - lo;
      if (span <= 1e-13 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)))) break;
      const double mid = 0.5 * (lo + hi);
      if (pencil_count_below(h, g, mid) >= k)
        hi = mid;
      else
        lo = mid;
    }
    values[k - 1] = 0.5 * (lo + hi);
  }
  return values;
}

inline HermitianMatrix random_hermitian(SplitMix64& rng, int d) {
  HermitianMatrix a(d);
  for (int i = 0; i < d; ++i) {
    a.set(i, i, Complex(2.0 * rng.next_pm1(), 0.0));
    for (int j = i + 1; j < d; ++j) {
      const double re = rng.next_pm1();
      const double im = rng.next_pm1();
      a.set(i, j, Complex(re, im));
    }
  }
  return a;
}

// B B^H + I/2: Hermitian and safely positive definite.
inline HermitianMatrix random_spd(SplitMix64& rng, int d) {
  std::vector<std::vector<Complex>> b(d, std::vector<Complex>(d));
  for (auto& row : b)
    for (Complex& v : row) {
      const double re = rng.next_pm1();
      const double im = rng.next_pm1();
      v = Complex(re, im);
    }
  HermitianMatrix g(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Complex s(0.0, 0.0);
      for (int k = 0; k < d; ++k) s += b[i][k] * std::conj(b[j][k]);
      if (i == j) s += Complex(0.5, 0.0);
      g.set(i, j, s);
    }
  return g;
}

inline CoefficientVector random_sparse_vector(SplitMix64& rng, int width) {
  std::vector<CoefficientVector::Entry> entries;
  entries.reserve(width);
  for (int i = 0; i < width; ++i) {
    const double re = rng.next_pm1();
    const double im = rng.next_pm1();
    entries.push_back({i, Complex(re, im)});
  }
  return CoefficientVector(std::move(entries));
}

template <typename Case>
VerifySuiteResult run_suite(const std::string& name, std::uint64_t seed, int trials,
                            Case run_case) {
  VerifySuiteResult result;
  result.name = name;
  result.total = trials;
  for (int t = 0; t < trials; ++t) {
    bool ok = false;
    try {
      ok = run_case(t);
    } catch (const Error&) {
      ok = false;
    }
    if (ok) {
      ++result.passed;
    } else if (result.ok) {
      result.ok = false;
      result.repro = "seed=" + std::to_string(seed) + " suite=" + name +
                     " case=" + std::to_string(t);
    }
  }
  return result;
}

}  // namespace verify_detail

inline std::vector<VerifySuiteResult> run_verify_suites(std::uint64_t seed, int trials) {
  if (trials < 0) throw ConfigInvalid("field 'trials': must be >= 0");
  namespace vd = verify_detail;
  std::vector<VerifySuiteResult> results;

  // Solver vs. the independent inertia-bisection path on random pencils.
  const std::uint64_t s0 = SplitMix64::at(seed, 0);
  results.push_back(vd::run_suite("eigensolver_oracle", seed, trials, [&](int t) {
    SplitMix64 rng = SplitMix64::substream(s0, static_cast<std::uint64_t>(t));
    const int d = 2 + t % 5;
    const HermitianMatrix h = vd::random_hermitian(rng, d);
    const HermitianMatrix g = vd::random_spd(rng, d);
    const std::vector<double> got = eigen_generalized(h, g).values;
    const std::vector<double> want = vd::pencil_eigenvalues_bisect(h, g);
    for (int k = 0; k < d; ++k)
      if (std::abs(got[k] - want[k]) > 1e-9 * std::max(1.0, std::abs(want[k])))
        return false;
    return true;
  }));

  // Sampled sup-inf characterization on random Hermitian matrices.
  const std::uint64_t s1 = SplitMix64::at(seed, 1);
  results.push_back(vd::run_suite("minimax_bound", seed, trials, [&](int t) {
    SplitMix64 rng = SplitMix64::substream(s1, static_cast<std::uint64_t>(t));
    const HermitianMatrix a = vd::random_hermitian(rng, 6);
    const int n = 1 + t % 3;
    const SupInfReport rep = supinf_verify(a, n, 20, rng.next());
    return rep.bound_ok && rep.achieved_ok;
  }));

  // Projected values never undercut the true spectrum from below.
  const std::uint64_t s2 = SplitMix64::at(seed, 2);
  results.push_back(vd::run_suite("upper_bound", seed, trials, [&](int t) {
    SplitMix64 rng = SplitMix64::substream(s2, static_cast<std::uint64_t>(t));
    OperatorModel op;
    if (t % 2 == 0)
      op = make_diagonal_operator([](int i) { return static_cast<double>(i + 1); },
                                  std::nullopt, 64);
    else
      op = make_matrix_operator(vd::random_hermitian(rng, 8));
    const int width = (t % 2 == 0) ? 12 : 8;
    TrialBasis basis;
    for (int j = 0; j < 4; ++j) basis.push_back(vd::random_sparse_vector(rng, width));
    const RitzSpectrum rs = ritz_spectrum(basis, op);
    const std::vector<double>& ref = *op.reference_spectrum;
    for (std::size_t k = 0; k < rs.values.size(); ++k)
      if (rs.values[k] < ref[k] - 1e-10 * std::max(1.0, std::abs(ref[k]))) return false;
    return true;
  }));

  // Growing a trial space may only lower each projected value.
  const std::uint64_t s3 = SplitMix64::at(seed, 3);
  results.push_back(vd::run_suite("monotonicity", seed, trials, [&](int t) {
    SplitMix64 rng = SplitMix64::substream(s3, static_cast<std::uint64_t>(t));
    const OperatorModel op = make_matrix_operator(vd::random_hermitian(rng, 8));
    TrialBasis full;
    for (int j = 0; j < 5; ++j) full.push_back(vd::random_sparse_vector(rng, 8));
    std::vector<TrialBasis> chain;
    for (int size : {3, 4, 5})
      chain.emplace_back(full.begin(), full.begin() + size);
    return nested_monotonicity_check(chain, op).all_ok;
  }));

  // Full study invariants on a seeded diagonal model under truncation.
  const std::uint64_t s4 = SplitMix64::at(seed, 4);
  results.push_back(vd::run_suite("sandwich", seed, trials, [&](int t) {
    SplitMix64 rng = SplitMix64::substream(s4, static_cast<std::uint64_t>(t));
    const double offset = rng.next_unit();
    const OperatorModel op = make_diagonal_operator(
        [offset](int i) { return offset + i + 1.0; }, std::nullopt, 64);
    const ApproximatingFamily fam = family_truncation(op, 2);
    const ConvergenceReport rep = run_study(op, fam, 2, 5);
    return rep.all_sandwich_ok && rep.monotone_ok && rep.converged_at[0] == 1 &&
           rep.converged_at[1] == 2;
  }));

  return results;
}

}  // namespace ritzlab
