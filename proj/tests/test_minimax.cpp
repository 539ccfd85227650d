#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "ritzlab/minimax.hpp"
#include "ritzlab/rng.hpp"

using ritzlab::Complex;
using ritzlab::HermitianMatrix;
using ritzlab::SplitMix64;

namespace {

HermitianMatrix random_hermitian(SplitMix64& rng, int d) {
  HermitianMatrix a(d);
  for (int i = 0; i < d; ++i) {
    a.set(i, i, Complex(2.0 * rng.next_pm1(), 0.0));
    for (int j = i + 1; j < d; ++j) a.set(i, j, Complex(rng.next_pm1(), rng.next_pm1()));
  }
  return a;
}

std::vector<Complex> unit(int d, int i) {
  std::vector<Complex> v(d, Complex(0.0, 0.0));
  v[i] = Complex(1.0, 0.0);
  return v;
}

}  // namespace

TEST_CASE("ordered values of a diagonal matrix", "[minimax]") {
  const HermitianMatrix a =
      HermitianMatrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 3.0}});
  REQUIRE(std::abs(ritzlab::matrix_minimax_value(a, 1) - 1.0) < 1e-14);
  REQUIRE(std::abs(ritzlab::matrix_minimax_value(a, 2) - 2.0) < 1e-14);
  REQUIRE(std::abs(ritzlab::matrix_minimax_value(a, 3) - 3.0) < 1e-14);
  REQUIRE_THROWS_AS(ritzlab::matrix_minimax_value(a, 0), ritzlab::RankOutOfRange);
  REQUIRE_THROWS_AS(ritzlab::matrix_minimax_value(a, 4), ritzlab::RankOutOfRange);
}

TEST_CASE("constrained infimum on hand examples", "[minimax]") {
  const HermitianMatrix diag =
      HermitianMatrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 3.0}});

  SECTION("no constraints: the bottom of the spectrum") {
    REQUIRE(std::abs(ritzlab::constrained_inf(diag, {}) - 1.0) < 1e-10);
  }
  SECTION("first coordinate removed") {
    REQUIRE(std::abs(ritzlab::constrained_inf(diag, {unit(3, 0)}) - 2.0) < 1e-10);
  }
  SECTION("two coordinates removed") {
    REQUIRE(std::abs(ritzlab::constrained_inf(diag, {unit(3, 0), unit(3, 1)}) - 3.0) <
            1e-10);
  }
  SECTION("constraints spanning everything leave an empty infimum") {
    const double v =
        ritzlab::constrained_inf(diag, {unit(3, 0), unit(3, 1), unit(3, 2)});
    REQUIRE(std::isinf(v));
    REQUIRE(v > 0.0);
  }
  SECTION("duplicate and zero constraints restrict nothing new") {
    const std::vector<Complex> zero(3, Complex(0.0, 0.0));
    const double v = ritzlab::constrained_inf(diag, {unit(3, 0), unit(3, 0), zero});
    REQUIRE(std::abs(v - 2.0) < 1e-10);
  }
  SECTION("coupled two by two") {
    const HermitianMatrix a = HermitianMatrix::from_rows({{2.0, -1.0}, {-1.0, 2.0}});
    // Orthogonal to (1, 1) means proportional to (1, -1), whose quotient is 3.
    const std::vector<Complex> ones = {Complex(1.0, 0.0), Complex(1.0, 0.0)};
    REQUIRE(std::abs(ritzlab::constrained_inf(a, {ones}) - 3.0) < 1e-10);
  }
  SECTION("mismatched constraint length") {
    REQUIRE_THROWS_AS(ritzlab::constrained_inf(diag, {unit(2, 0)}),
                      ritzlab::DimensionMismatch);
  }
}

TEST_CASE("repeated bottom value keeps the constrained infimum pinned", "[minimax]") {
  const HermitianMatrix a =
      HermitianMatrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 4.0}});
  // One constraint cannot clear a two-dimensional bottom eigenspace.
  REQUIRE(std::abs(ritzlab::constrained_inf(a, {unit(3, 0)}) - 1.0) < 1e-10);
  const auto rep = ritzlab::supinf_verify(a, 2, 50, 13u);
  REQUIRE(std::abs(rep.mu - 1.0) < 1e-12);
  REQUIRE(rep.bound_ok);
  REQUIRE(rep.achieved_ok);
}

TEST_CASE("sampled characterization holds on seeded matrices", "[minimax][property]") {
  for (int t = 0; t < 20; ++t) {
    SplitMix64 rng = SplitMix64::substream(83u, t);
    const HermitianMatrix a = random_hermitian(rng, 6);
    const int n = 1 + t % 3;
    const auto rep = ritzlab::supinf_verify(a, n, 40, rng.next());
    REQUIRE(rep.bound_ok);
    REQUIRE(rep.achieved_ok);
    REQUIRE(rep.max_sampled <= rep.mu + 1e-10 * std::max(1.0, std::abs(rep.mu)));
  }
}

TEST_CASE("sampling zero trials verifies nothing and says so", "[minimax]") {
  SplitMix64 rng(5u);
  const HermitianMatrix a = random_hermitian(rng, 4);
  const auto rep = ritzlab::supinf_verify(a, 2, 0, 7u);
  REQUIRE(rep.max_sampled == -std::numeric_limits<double>::infinity());
  REQUIRE(rep.bound_ok);  // vacuously
  REQUIRE(rep.achieved_ok);
}

TEST_CASE("ordered values grow with the rank", "[minimax][property]") {
  for (int t = 0; t < 20; ++t) {
    SplitMix64 rng = SplitMix64::substream(89u, t);
    const HermitianMatrix a = random_hermitian(rng, 5);
    for (int n = 1; n < 5; ++n)
      REQUIRE(ritzlab::matrix_minimax_value(a, n) <=
              ritzlab::matrix_minimax_value(a, n + 1) + 1e-13);
  }
}

TEST_CASE("minimum principle with pinned eigenvectors", "[minimax]") {
  const HermitianMatrix a =
      HermitianMatrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 3.0}});
  REQUIRE(std::abs(ritzlab::minimum_principle(a, {}) - 1.0) < 1e-10);
  REQUIRE(std::abs(ritzlab::minimum_principle(a, {unit(3, 0)}) - 2.0) < 1e-10);
  REQUIRE(std::abs(ritzlab::minimum_principle(a, {unit(3, 0), unit(3, 1)}) - 3.0) <
          1e-10);

  // A vector that is not an eigenvector is rejected with its position.
  const std::vector<Complex> slanted = {Complex(1.0, 0.0), Complex(1.0, 0.0),
                                        Complex(0.0, 0.0)};
  REQUIRE_THROWS_AS(ritzlab::minimum_principle(a, {unit(3, 0), slanted}),
                    ritzlab::NotEigenvector);
  try {
    ritzlab::minimum_principle(a, {unit(3, 0), slanted});
  } catch (const ritzlab::NotEigenvector& e) {
    REQUIRE(e.vector_index == 2);
    REQUIRE(e.residual > 1e-2);
  }

  REQUIRE_THROWS_AS(ritzlab::minimum_principle(a, {unit(2, 0)}),
                    ritzlab::DimensionMismatch);
}

TEST_CASE("minimum principle accepts eigenvectors found by the solver", "[minimax]") {
  SplitMix64 rng(97u);
  const HermitianMatrix a = random_hermitian(rng, 5);
  const auto eig = ritzlab::eigen_hermitian(a);
  std::vector<std::vector<Complex>> pinned;
  for (int k = 0; k < 2; ++k) pinned.push_back(eig.vectors.column(k));
  const double third = ritzlab::minimum_principle(a, pinned);
  REQUIRE(std::abs(third - eig.values[2]) < 1e-9 * std::max(1.0, std::abs(eig.values[2])));
}
