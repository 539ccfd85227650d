#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hermitian.hpp"
#include "rng.hpp"

namespace ritzlab {

// ---------------------------------------------------------------------------
// Variational characterization of ordered eigenvalues of a finite Hermitian
// matrix.  The n-th value is
//
//   mu_n = sup over (n-1) constraint vectors of
//          inf { <x|Ax> / <x|x> : x orthogonal to all constraints },
//
// the sup being achieved at the first n-1 eigenvectors.  These helpers
// compute mu_n directly, evaluate the inner inf for arbitrary constraint
// sets, and sample the sup to confirm the two defining properties: any
// constraint set gives a value <= mu_n, and the optimal set attains it.
// ---------------------------------------------------------------------------

inline double matrix_minimax_value(const HermitianMatrix& a, int n) {
  if (n < 1 || n > a.dim())
    throw RankOutOfRange("minimax rank " + std::to_string(n) + " outside 1.." +
                         std::to_string(a.dim()));
  return eigen_hermitian(a).values[n - 1];
}

namespace detail {

inline Complex dense_inner(const std::vector<Complex>& x, const std::vector<Complex>& y) {
  Complex s(0.0, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline double dense_norm(const std::vector<Complex>& x) {
  double s = 0.0;
  for (const Complex& v : x) s += std::norm(v);
  return std::sqrt(s);
}

// Subtract the projections of v onto the (orthonormal) columns in q.  Two
// passes keep the result orthogonal even when v nearly lies in span(q).
inline void project_out(std::vector<Complex>& v,
                        const std::vector<std::vector<Complex>>& q) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& u : q) {
      const Complex c = dense_inner(u, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
    }
}

}  // namespace detail

// Infimum of the Rayleigh quotient of `a` over the orthogonal complement of
// the given constraint vectors.  An empty complement (constraints span the
// whole space) leaves an inf over nothing, which is +infinity.
inline double constrained_inf(const HermitianMatrix& a,
                              const std::vector<std::vector<Complex>>& constraints) {
  const int d = a.dim();

  // Orthonormalize the constraints, dropping (numerically) dependent ones;
  // they restrict nothing beyond the vectors already kept.
  std::vector<std::vector<Complex>> q;
  for (const auto& c : constraints) {
    if (static_cast<int>(c.size()) != d)
      throw DimensionMismatch("constraint length " + std::to_string(c.size()) +
                              " does not match dimension " + std::to_string(d));
    const double orig = detail::dense_norm(c);
    if (orig == 0.0) continue;
    std::vector<Complex> v = c;
    detail::project_out(v, q);
    const double res = detail::dense_norm(v);
    if (res > 1e-12 * orig) {
      for (Complex& x : v) x /= res;
      q.push_back(std::move(v));
    }
  }

  // Orthonormal basis of the complement, grown from coordinate vectors.
  std::vector<std::vector<Complex>> comp;
  for (int i = 0; i < d; ++i) {
    std::vector<Complex> v(d, Complex(0.0, 0.0));
    v[i] = Complex(1.0, 0.0);
    detail::project_out(v, q);
    detail::project_out(v, comp);
    const double res = detail::dense_norm(v);
    if (res > 1e-8) {
      for (Complex& x : v) x /= res;
      comp.push_back(std::move(v));
    }
  }
  if (comp.empty()) return std::numeric_limits<double>::infinity();

  // Compress a onto the complement and take the smallest eigenvalue there.
  const int m = static_cast<int>(comp.size());
  ComplexMatrix b(m, m);
  for (int l = 0; l < m; ++l) {
    const std::vector<Complex> ac = matrix_apply(a, comp[l]);
    for (int k = 0; k < m; ++k) b(k, l) = detail::dense_inner(comp[k], ac);
  }
  return eigen_hermitian(HermitianMatrix(b)).values.front();
}

// ---------------------------------------------------------------------------
// Sampled confirmation of the sup-inf characterization for one rank.
// ---------------------------------------------------------------------------

struct SupInfReport {
  double mu = 0.0;           // eigenvalue being characterized
  double max_sampled = 0.0;  // best inf over the random constraint sets
  double achieved = 0.0;     // inf at the optimal (eigenvector) constraints
  bool bound_ok = true;      // every sample stayed <= mu (within slack)
  bool achieved_ok = true;   // optimal constraints attained mu (within slack)
};

inline SupInfReport supinf_verify(const HermitianMatrix& a, int n, int trials,
                                  std::uint64_t seed) {
  if (trials < 0) throw ConfigInvalid("field 'trials': must be >= 0");
  const int d = a.dim();
  SupInfReport report;
  report.mu = matrix_minimax_value(a, n);
  const double slack = 1e-10 * std::max(1.0, std::abs(report.mu));

  report.max_sampled = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(t));
    std::vector<std::vector<Complex>> constraints(n - 1);
    for (auto& c : constraints) {
      c.resize(d);
      for (Complex& x : c) {
        const double re = rng.next_pm1();
        const double im = rng.next_pm1();
        x = Complex(re, im);
      }
    }
    const double value = constrained_inf(a, constraints);
    report.max_sampled = std::max(report.max_sampled, value);
    if (value > report.mu + slack) report.bound_ok = false;
  }

  const EigenDecomposition eig = eigen_hermitian(a);
  std::vector<std::vector<Complex>> best(n - 1);
  for (int k = 0; k < n - 1; ++k) best[k] = eig.vectors.column(k);
  report.achieved = constrained_inf(a, best);
  report.achieved_ok = std::abs(report.achieved - report.mu) <= slack;
  return report;
}

// ---------------------------------------------------------------------------
// Recursive minimum principle: with the first eigenvectors pinned down, the
// next eigenvalue is the minimum of the quotient on their orthogonal
// complement.  The claimed eigenvectors are verified first; a vector whose
// pencil residual is out of tolerance is rejected by 1-based position.
// ---------------------------------------------------------------------------

inline double minimum_principle(const HermitianMatrix& a,
                                const std::vector<std::vector<Complex>>& eigenvectors) {
  const double tol = 1e-8 * std::max(max_abs(a), 1e-300);
  int position = 0;
  for (const auto& v : eigenvectors) {
    ++position;
    if (static_cast<int>(v.size()) != a.dim())
      throw DimensionMismatch("eigenvector length " + std::to_string(v.size()) +
                              " does not match dimension " + std::to_string(a.dim()));
    const double nv = detail::dense_norm(v);
    if (nv == 0.0) throw NotEigenvector(position, std::numeric_limits<double>::infinity());
    const std::vector<Complex> av = matrix_apply(a, v);
    const double rho = detail::dense_inner(v, av).real() / (nv * nv);
    double res_sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) res_sq += std::norm(av[i] - rho * v[i]);
    const double res = std::sqrt(res_sq) / nv;
    if (res > tol) throw NotEigenvector(position, res);
  }
  return constrained_inf(a, eigenvectors);
}

}  // namespace ritzlab
