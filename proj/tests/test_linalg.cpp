#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "ritzlab/hermitian.hpp"
#include "ritzlab/rng.hpp"

#include "oracles.hpp"

using ritzlab::Complex;
using ritzlab::ComplexMatrix;
using ritzlab::HermitianMatrix;
using ritzlab::SplitMix64;

namespace {

HermitianMatrix random_hermitian(SplitMix64& rng, int d) {
  HermitianMatrix a(d);
  for (int i = 0; i < d; ++i) {
    a.set(i, i, Complex(2.0 * rng.next_pm1(), 0.0));
    for (int j = i + 1; j < d; ++j)
      a.set(i, j, Complex(rng.next_pm1(), rng.next_pm1()));
  }
  return a;
}

HermitianMatrix random_spd(SplitMix64& rng, int d) {
  ComplexMatrix b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = Complex(rng.next_pm1(), rng.next_pm1());
  HermitianMatrix g(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Complex s = (i == j) ? Complex(0.5, 0.0) : Complex(0.0, 0.0);
      for (int k = 0; k < d; ++k) s += b(i, k) * std::conj(b(j, k));
      g.set(i, j, s);
    }
  return g;
}

oracle::dense to_dense(const HermitianMatrix& m) {
  oracle::dense out(m.dim(), std::vector<oracle::cd>(m.dim()));
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out[i][j] = m(i, j);
  return out;
}

}  // namespace

TEST_CASE("hermitian storage symmetrizes dense input", "[linalg]") {
  ComplexMatrix d(2, 2);
  d(0, 0) = Complex(1.0, 0.5);  // stray imaginary part on the diagonal
  d(0, 1) = Complex(2.0, 1.0);
  d(1, 0) = Complex(0.0, 0.0);
  d(1, 1) = Complex(3.0, 0.0);
  HermitianMatrix h(d);
  REQUIRE(h(0, 0) == Complex(1.0, 0.0));
  REQUIRE(h(1, 1) == Complex(3.0, 0.0));
  REQUIRE(h(0, 1) == Complex(1.0, 0.5));
  REQUIRE(h(1, 0) == std::conj(h(0, 1)));
}

TEST_CASE("cholesky of a diagonal matrix takes square roots", "[linalg]") {
  const HermitianMatrix g = HermitianMatrix::from_rows({{4.0, 0.0}, {0.0, 9.0}});
  const ComplexMatrix l = ritzlab::cholesky(g);
  REQUIRE(l(0, 0) == Complex(2.0, 0.0));
  REQUIRE(l(1, 1) == Complex(3.0, 0.0));
  REQUIRE(l(0, 1) == Complex(0.0, 0.0));
  REQUIRE(l(1, 0) == Complex(0.0, 0.0));
}

TEST_CASE("cholesky factor reconstructs the input", "[linalg]") {
  const HermitianMatrix g = HermitianMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}});
  const ComplexMatrix l = ritzlab::cholesky(g);
  // G = L L^H entrywise.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Complex s(0.0, 0.0);
      for (int k = 0; k < 2; ++k) s += l(i, k) * std::conj(l(j, k));
      REQUIRE(std::abs(s - g(i, j)) < 1e-12);
    }

  // And for a complex case drawn once.
  SplitMix64 rng(7u);
  const HermitianMatrix gc = random_spd(rng, 5);
  const ComplexMatrix lc = ritzlab::cholesky(gc);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      Complex s(0.0, 0.0);
      for (int k = 0; k < 5; ++k) s += lc(i, k) * std::conj(lc(j, k));
      REQUIRE(std::abs(s - gc(i, j)) < 1e-12 * ritzlab::max_abs(gc));
    }
}

TEST_CASE("cholesky rejects non positive definite input", "[linalg]") {
  const HermitianMatrix indefinite =
      HermitianMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  REQUIRE_THROWS_AS(ritzlab::cholesky(indefinite), ritzlab::NotPositiveDefinite);
  try {
    ritzlab::cholesky(indefinite);
  } catch (const ritzlab::NotPositiveDefinite& e) {
    REQUIRE(e.pivot_index == 1);
    REQUIRE(e.pivot_value < 0.0);
  }

  // Singular: second pivot collapses to zero.
  const HermitianMatrix singular = HermitianMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
  REQUIRE_THROWS_AS(ritzlab::cholesky(singular), ritzlab::NotPositiveDefinite);

  const HermitianMatrix zero(2);
  try {
    ritzlab::cholesky(zero);
    FAIL("zero matrix must not factor");
  } catch (const ritzlab::NotPositiveDefinite& e) {
    REQUIRE(e.pivot_index == 0);
  }
}

TEST_CASE("eigenvalues of small fixed matrices", "[linalg]") {
  SECTION("already diagonal, needs sorting only") {
    const HermitianMatrix a =
        HermitianMatrix::from_rows({{3.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 2.0}});
    const auto eig = ritzlab::eigen_hermitian(a);
    REQUIRE(eig.values.size() == 3);
    REQUIRE(std::abs(eig.values[0] - 1.0) < 1e-14);
    REQUIRE(std::abs(eig.values[1] - 2.0) < 1e-14);
    REQUIRE(std::abs(eig.values[2] - 3.0) < 1e-14);
  }
  SECTION("symmetric flip") {
    const HermitianMatrix a = HermitianMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    const auto eig = ritzlab::eigen_hermitian(a);
    REQUIRE(std::abs(eig.values[0] + 1.0) < 1e-14);
    REQUIRE(std::abs(eig.values[1] - 1.0) < 1e-14);
  }
  SECTION("discrete second difference") {
    const HermitianMatrix a = HermitianMatrix::from_rows({{2.0, -1.0}, {-1.0, 2.0}});
    const auto eig = ritzlab::eigen_hermitian(a);
    REQUIRE(std::abs(eig.values[0] - 1.0) < 1e-14);
    REQUIRE(std::abs(eig.values[1] - 3.0) < 1e-14);
    // Ground state is the equal-weight combination, phase-fixed to be real
    // and positive on its largest entry.
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(eig.vectors(0, 0) - Complex(inv_sqrt2, 0.0)) < 1e-12);
    REQUIRE(std::abs(eig.vectors(1, 0) - Complex(inv_sqrt2, 0.0)) < 1e-12);
  }
  SECTION("genuinely complex entries") {
    const HermitianMatrix a =
        HermitianMatrix::from_rows({{Complex(1.0, 0.0), Complex(0.0, 1.0)},
                                    {Complex(0.0, -1.0), Complex(1.0, 0.0)}});
    const auto eig = ritzlab::eigen_hermitian(a);
    REQUIRE(std::abs(eig.values[0] - 0.0) < 1e-14);
    REQUIRE(std::abs(eig.values[1] - 2.0) < 1e-14);
  }
}

TEST_CASE("rotation solver reports residual and respects sweep cap", "[linalg]") {
  const HermitianMatrix a = HermitianMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  REQUIRE_THROWS_AS(ritzlab::eigen_hermitian(a, 0), ritzlab::ConvergenceFailure);
  try {
    ritzlab::eigen_hermitian(a, 0);
  } catch (const ritzlab::ConvergenceFailure& e) {
    REQUIRE(e.iterations == 0);
  }
  const auto eig = ritzlab::eigen_hermitian(a);
  REQUIRE(eig.residual < 1e-13);
}

TEST_CASE("random hermitian matrices: ascending values, unitary vectors, small residual",
          "[linalg][property]") {
  for (int trial = 0; trial < 50; ++trial) {
    SplitMix64 rng = SplitMix64::substream(11u, trial);
    const int d = 2 + trial % 6;
    const HermitianMatrix a = random_hermitian(rng, d);
    const auto eig = ritzlab::eigen_hermitian(a);

    for (int k = 1; k < d; ++k) REQUIRE(eig.values[k - 1] <= eig.values[k]);
    REQUIRE(eig.residual <= 1e-12 * std::max(1.0, ritzlab::frobenius_norm(a)));

    // Eigenvalue sum matches the trace (similarity invariant).
    double sum = 0.0;
    for (double v : eig.values) sum += v;
    REQUIRE(std::abs(sum - ritzlab::trace_real(a)) < 1e-11 * std::max(1.0, std::abs(sum)));

    // Columns are orthonormal.
    for (int c1 = 0; c1 < d; ++c1)
      for (int c2 = c1; c2 < d; ++c2) {
        Complex dot(0.0, 0.0);
        for (int r = 0; r < d; ++r)
          dot += std::conj(eig.vectors(r, c1)) * eig.vectors(r, c2);
        const Complex want = (c1 == c2) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
        REQUIRE(std::abs(dot - want) < 1e-11);
      }
  }
}

TEST_CASE("shifting a matrix shifts every eigenvalue", "[linalg][property]") {
  SplitMix64 rng(23u);
  const HermitianMatrix a = random_hermitian(rng, 5);
  HermitianMatrix shifted = a;
  for (int i = 0; i < 5; ++i) shifted.set(i, i, a(i, i) + Complex(2.5, 0.0));
  const auto ea = ritzlab::eigen_hermitian(a);
  const auto es = ritzlab::eigen_hermitian(shifted);
  for (int k = 0; k < 5; ++k) REQUIRE(std::abs(es.values[k] - ea.values[k] - 2.5) < 1e-11);
}

TEST_CASE("generalized problem with identity mass reduces to the plain one", "[linalg]") {
  const HermitianMatrix h = HermitianMatrix::from_rows({{1.0, 0.0}, {0.0, 2.0}});
  HermitianMatrix g(2);
  g.set(0, 0, Complex(1.0, 0.0));
  g.set(1, 1, Complex(1.0, 0.0));
  const auto eig = ritzlab::eigen_generalized(h, g);
  REQUIRE(std::abs(eig.values[0] - 1.0) < 1e-14);
  REQUIRE(std::abs(eig.values[1] - 2.0) < 1e-14);
}

TEST_CASE("generalized problem scales out the mass", "[linalg]") {
  // H = diag(2, 8) against G = diag(2, 2) is diag(1, 4) in disguise.
  const HermitianMatrix h = HermitianMatrix::from_rows({{2.0, 0.0}, {0.0, 8.0}});
  const HermitianMatrix g = HermitianMatrix::from_rows({{2.0, 0.0}, {0.0, 2.0}});
  const auto eig = ritzlab::eigen_generalized(h, g);
  REQUIRE(std::abs(eig.values[0] - 1.0) < 1e-14);
  REQUIRE(std::abs(eig.values[1] - 4.0) < 1e-14);
}

TEST_CASE("generalized solver agrees with the inertia-bisection oracle",
          "[linalg][property]") {
  for (int trial = 0; trial < 200; ++trial) {
    SplitMix64 rng = SplitMix64::substream(31u, trial);
    const int d = 2 + trial % 5;
    const HermitianMatrix h = random_hermitian(rng, d);
    const HermitianMatrix g = random_spd(rng, d);

    const auto eig = ritzlab::eigen_generalized(h, g);
    const std::vector<double> want = oracle::pencil_eigenvalues(to_dense(h), to_dense(g));
    REQUIRE(eig.values.size() == want.size());
    for (int k = 0; k < d; ++k)
      REQUIRE(std::abs(eig.values[k] - want[k]) <= 1e-9 * std::max(1.0, std::abs(want[k])));

    // Pencil residual: H v = theta G v columnwise.
    REQUIRE(eig.residual <=
            1e-10 * std::max(1.0, ritzlab::max_abs(h) + ritzlab::max_abs(g)));
  }
}

TEST_CASE("generalized solver refuses mismatched dimensions", "[linalg]") {
  const HermitianMatrix h = HermitianMatrix::from_rows({{1.0, 0.0}, {0.0, 2.0}});
  HermitianMatrix g(3);
  for (int i = 0; i < 3; ++i) g.set(i, i, Complex(1.0, 0.0));
  REQUIRE_THROWS_AS(ritzlab::eigen_generalized(h, g), ritzlab::DimensionMismatch);
}

TEST_CASE("condition estimate on gram matrices", "[linalg]") {
  HermitianMatrix id(3);
  for (int i = 0; i < 3; ++i) id.set(i, i, Complex(1.0, 0.0));
  REQUIRE(ritzlab::condition_estimate(id) == 1.0);

  const HermitianMatrix d41 = HermitianMatrix::from_rows({{4.0, 0.0}, {0.0, 1.0}});
  REQUIRE(std::abs(ritzlab::condition_estimate(d41) - 4.0) < 1e-12);

  // Two unit vectors a hair apart: condition explodes like (1+c)/(1-c).
  const double c = std::cos(1e-6);
  const HermitianMatrix nearly = HermitianMatrix::from_rows({{1.0, c}, {c, 1.0}});
  const double cond = ritzlab::condition_estimate(nearly);
  const double expected = (1.0 + c) / (1.0 - c);  // about 4e12
  REQUIRE(cond > 1e12);
  REQUIRE(std::abs(cond - expected) < 1e-3 * expected);

  // Rank-deficient input is reported as unconditioned, not as a throw.
  const HermitianMatrix singular = HermitianMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
  REQUIRE(std::isinf(ritzlab::condition_estimate(singular)));
}
