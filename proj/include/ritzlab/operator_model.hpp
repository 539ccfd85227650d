#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "coefficient_vector.hpp"
#include "errors.hpp"
#include "hermitian.hpp"
#include "rng.hpp"

namespace ritzlab {

// ---------------------------------------------------------------------------
// Operator models.
//
// An operator enters the library only through two computable maps on
// finitely supported coordinate vectors:
//
//   inner(X, Y)  the ambient inner product, conjugate-linear in X,
//   form(X, Y)   the operator's sesquilinear energy form, same convention,
//
// together with a lower bound C such that form(X, X) >= C * inner(X, X) for
// every admissible X.  Optional capabilities describe what else is known:
// a reference spectrum, an essential-spectrum threshold, coordinate rules for
// exact eigenvectors (used by truncation families), continuum eigenfunctions
// on a mesh (used by interpolation families), and a finite dimension.
//
// variational_reference records whether trial quotients provably dominate the
// reference values.  Models whose forms are exact integrals or exact sums
// satisfy this; quadrature-based models do not (their discrete spectra can
// sit slightly below the analytic one), so studies only certify the lower
// two-sided bound against references flagged variational.
// ---------------------------------------------------------------------------

struct OperatorMesh {
  double a = 0.0;
  double b = 1.0;
  int nodes = 0;
  double h() const { return (b - a) / (nodes + 1); }
  double node(int i) const { return a + (i + 1) * h(); }
};

struct OperatorModel {
  std::function<Complex(const CoefficientVector&, const CoefficientVector&)> inner;
  std::function<Complex(const CoefficientVector&, const CoefficientVector&)> form;
  double lower_bound = 0.0;
  std::optional<std::vector<double>> reference_spectrum;
  std::optional<double> ess_inf;

  std::optional<int> dim;
  bool variational_reference = true;
  // k-th exact eigenvector (k is 1-based), truncated to coordinates < n.
  std::function<CoefficientVector(int k, int n)> eigenvector_rule;
  // k-th continuum eigenfunction evaluated at x (mesh models, 1-based k).
  std::function<double(int k, double x)> eigenfunction;
  std::optional<OperatorMesh> mesh;
  std::string description;
};

namespace detail {

// Index guard shared by the finite-dimensional models.
inline void check_dimension(const CoefficientVector& x, int dim) {
  if (x.max_index() >= dim)
    throw IndexOutOfRange("coordinate index " + std::to_string(x.max_index()) +
                          " outside operator dimension " + std::to_string(dim));
}

// Walk the common support of x and y, accumulating conj(x_i) * w(i) * y_i.
template <typename Weight>
inline Complex weighted_common_sum(const CoefficientVector& x, const CoefficientVector& y,
                                   Weight w) {
  Complex s(0.0, 0.0);
  auto ix = x.entries().begin();
  auto iy = y.entries().begin();
  while (ix != x.entries().end() && iy != y.entries().end()) {
    if (ix->index < iy->index) {
      ++ix;
    } else if (iy->index < ix->index) {
      ++iy;
    } else {
      s += std::conj(ix->value) * w(ix->index) * iy->value;
      ++ix;
      ++iy;
    }
  }
  return s;
}

// Eigenvalue rules are enumerated over a finite horizon to order eigenvalues
// and build a reference prefix; monotone rules (all shipped ones) make this
// exact.  Reference lists keep at most 64 entries.
struct RuleEnumeration {
  std::vector<int> order;           // order[k] = coordinate of (k+1)-smallest value
  std::vector<double> values;       // values[i] = rule(i)
  std::vector<double> reference;    // ascending, below ess_inf if set, <= 64 entries
  double lower = 0.0;
};

inline RuleEnumeration enumerate_rule(const std::function<double(int)>& rule,
                                      const std::optional<double>& ess_inf, int limit) {
  if (limit < 1) throw ConfigInvalid("field 'enumeration_limit': must be >= 1");
  RuleEnumeration e;
  e.values.resize(limit);
  for (int i = 0; i < limit; ++i) {
    const double v = rule(i);
    if (!std::isfinite(v)) throw Error("eigenvalue rule produced a non-finite value");
    e.values[i] = v;
  }
  e.order.resize(limit);
  std::iota(e.order.begin(), e.order.end(), 0);
  std::stable_sort(e.order.begin(), e.order.end(),
                   [&](int i, int j) { return e.values[i] < e.values[j]; });
  e.lower = e.values[e.order.front()];
  for (int k = 0; k < limit && static_cast<int>(e.reference.size()) < 64; ++k) {
    const double v = e.values[e.order[k]];
    if (ess_inf && !(v < *ess_inf)) break;
    e.reference.push_back(v);
  }
  return e;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Finite Hermitian matrix acting on the Euclidean coordinate space, shifted
// by `shift` times the identity.  Reference spectrum and eigenvector rules
// come from a full diagonalization at construction.
// ---------------------------------------------------------------------------

inline OperatorModel make_matrix_operator(const HermitianMatrix& a, double shift = 0.0) {
  auto mat = std::make_shared<HermitianMatrix>(a);
  auto eig = std::make_shared<EigenDecomposition>(eigen_hermitian(a));
  const int n = a.dim();

  OperatorModel op;
  op.dim = n;
  op.inner = [n](const CoefficientVector& x, const CoefficientVector& y) {
    detail::check_dimension(x, n);
    detail::check_dimension(y, n);
    return l2_inner(x, y);
  };
  op.form = [mat, shift, n](const CoefficientVector& x, const CoefficientVector& y) {
    detail::check_dimension(x, n);
    detail::check_dimension(y, n);
    const std::vector<Complex> yd = y.densify(n);
    const std::vector<Complex> ay = matrix_apply(*mat, yd);
    Complex s(0.0, 0.0);
    for (const auto& e : x.entries())
      s += std::conj(e.value) * (ay[e.index] + shift * yd[e.index]);
    return s;
  };
  std::vector<double> ref = eig->values;
  for (double& v : ref) v += shift;
  op.lower_bound = ref.front();
  op.reference_spectrum = ref;
  op.eigenvector_rule = [eig, n](int k, int trunc) {
    if (k < 1 || k > n) throw RankOutOfRange("eigenvector rank " + std::to_string(k));
    std::vector<CoefficientVector::Entry> entries;
    for (int i = 0; i < std::min(trunc, n); ++i)
      entries.push_back({i, eig->vectors(i, k - 1)});
    return CoefficientVector(std::move(entries));
  };
  op.description = "matrix operator (dim " + std::to_string(n) + ")";
  return op;
}

// ---------------------------------------------------------------------------
// Diagonal operator on l2: form(X, Y) = sum_i conj(x_i) * rule(i) * y_i.
// The k-th eigenvector is the coordinate vector at the k-th smallest rule
// value, so truncation families over this model become exact at finite steps.
// ---------------------------------------------------------------------------

inline OperatorModel make_diagonal_operator(std::function<double(int)> rule,
                                            std::optional<double> ess_inf = std::nullopt,
                                            int enumeration_limit = 4096) {
  auto shared_rule = std::make_shared<std::function<double(int)>>(std::move(rule));
  auto enumeration = std::make_shared<detail::RuleEnumeration>(
      detail::enumerate_rule(*shared_rule, ess_inf, enumeration_limit));

  OperatorModel op;
  op.inner = [](const CoefficientVector& x, const CoefficientVector& y) {
    return l2_inner(x, y);
  };
  op.form = [shared_rule](const CoefficientVector& x, const CoefficientVector& y) {
    return detail::weighted_common_sum(x, y, [&](int i) { return (*shared_rule)(i); });
  };
  op.lower_bound = enumeration->lower;
  op.reference_spectrum = enumeration->reference;
  op.ess_inf = ess_inf;
  op.eigenvector_rule = [enumeration](int k, int trunc) {
    if (k < 1 || k > static_cast<int>(enumeration->order.size()))
      throw RankOutOfRange("eigenvector rank " + std::to_string(k));
    const int coord = enumeration->order[k - 1];
    if (coord < trunc) return CoefficientVector::unit(coord);
    return CoefficientVector();
  };
  op.description = "diagonal operator";
  return op;
}

// ---------------------------------------------------------------------------
// Diagonal operator expressed in a mixed computational basis.
//
// The basis is rotated by the reflection U = I - 2 w w^T, where w is a real
// unit vector supported on the first `tail_support` coordinates with
// |w_i| = c / (i+1)^tail_exponent and signs drawn from the seeded generator.
// The spectrum is untouched; the eigenvectors become U e_i, whose coordinates
// carry genuine polynomial tails, so coordinate truncation is a nontrivial
// approximation scheme.  Because w has finite support, every eigenvector is
// exactly representable: eigenvector_rule(k, n) with n >= tail_support is the
// exact eigenvector, and the form below is a finite exact computation.
// ---------------------------------------------------------------------------

inline OperatorModel make_mixed_diagonal_operator(std::function<double(int)> rule,
                                                  std::optional<double> ess_inf,
                                                  std::uint64_t mixing_seed,
                                                  double tail_exponent = 1.0,
                                                  int tail_support = 50000,
                                                  int enumeration_limit = 4096) {
  if (!(tail_exponent >= 0.75))
    throw ConfigInvalid("field 'tail_exponent': must be >= 0.75");
  if (tail_support < 1) throw ConfigInvalid("field 'tail_support': must be >= 1");

  auto shared_rule = std::make_shared<std::function<double(int)>>(std::move(rule));
  auto enumeration = std::make_shared<detail::RuleEnumeration>(
      detail::enumerate_rule(*shared_rule, ess_inf, enumeration_limit));

  auto w = std::make_shared<std::vector<double>>(tail_support);
  for (int i = 0; i < tail_support; ++i) {
    const bool flip = (SplitMix64::at(mixing_seed, static_cast<std::uint64_t>(i)) >> 63) != 0;
    (*w)[i] = (flip ? -1.0 : 1.0) * std::pow(static_cast<double>(i + 1), -tail_exponent);
  }
  // Normalize and precompute <w|L w>, accumulating small terms first.
  double norm_sq = 0.0;
  for (int i = tail_support - 1; i >= 0; --i) norm_sq += (*w)[i] * (*w)[i];
  const double scale = 1.0 / std::sqrt(norm_sq);
  for (double& v : *w) v *= scale;
  double w_form_w = 0.0;
  for (int i = tail_support - 1; i >= 0; --i)
    w_form_w += (*shared_rule)(i) * (*w)[i] * (*w)[i];

  OperatorModel op;
  op.inner = [](const CoefficientVector& x, const CoefficientVector& y) {
    return l2_inner(x, y);
  };
  op.form = [shared_rule, w, w_form_w](const CoefficientVector& x,
                                       const CoefficientVector& y) {
    const auto& rule_fn = *shared_rule;
    const auto& wv = *w;
    const int support = static_cast<int>(wv.size());
    Complex wx(0.0, 0.0), wy(0.0, 0.0), x_form_w(0.0, 0.0), w_form_y(0.0, 0.0);
    for (const auto& e : x.entries()) {
      if (e.index >= support) break;
      wx += wv[e.index] * e.value;
      x_form_w += std::conj(e.value) * rule_fn(e.index) * wv[e.index];
    }
    for (const auto& e : y.entries()) {
      if (e.index >= support) break;
      wy += wv[e.index] * e.value;
      w_form_y += wv[e.index] * rule_fn(e.index) * e.value;
    }
    const Complex diag =
        detail::weighted_common_sum(x, y, [&](int i) { return rule_fn(i); });
    return diag - 2.0 * wy * x_form_w - 2.0 * std::conj(wx) * w_form_y +
           4.0 * std::conj(wx) * wy * w_form_w;
  };
  op.lower_bound = enumeration->lower;
  op.reference_spectrum = enumeration->reference;
  op.ess_inf = ess_inf;
  op.eigenvector_rule = [enumeration, w](int k, int trunc) {
    if (k < 1 || k > static_cast<int>(enumeration->order.size()))
      throw RankOutOfRange("eigenvector rank " + std::to_string(k));
    const int coord = enumeration->order[k - 1];
    const auto& wv = *w;
    const int support = static_cast<int>(wv.size());
    std::vector<CoefficientVector::Entry> entries;
    if (coord < support) {
      const double wk = wv[coord];
      const int m = std::min(trunc, support);
      entries.reserve(static_cast<std::size_t>(m) + 1);
      for (int i = 0; i < m; ++i) entries.push_back({i, Complex(-2.0 * wk * wv[i], 0.0)});
    }
    if (coord < trunc) entries.push_back({coord, Complex(1.0, 0.0)});
    return CoefficientVector(std::move(entries));
  };
  op.description = "mixed-basis diagonal operator";
  return op;
}

// ---------------------------------------------------------------------------
// One-dimensional second-derivative operator with Dirichlet ends on (0,
// length), modeled over piecewise-linear hat functions on a uniform mesh of
// `nodes` interior points.  Mass and stiffness entries are the exact
// integrals (2h/3 and h/6; 2/h and -1/h), so trial quotients genuinely
// dominate the continuum eigenvalues (k*pi/length)^2.
// ---------------------------------------------------------------------------

inline OperatorModel make_dirichlet_laplacian(double length, int nodes) {
  if (!(length > 0.0)) throw ConfigInvalid("field 'length': must be positive");
  if (nodes < 1) throw ConfigInvalid("field 'nodes': must be >= 1");
  const double h = length / (nodes + 1);

  OperatorModel op;
  op.dim = nodes;
  op.inner = [nodes, h](const CoefficientVector& x, const CoefficientVector& y) {
    detail::check_dimension(x, nodes);
    detail::check_dimension(y, nodes);
    Complex s(0.0, 0.0);
    for (const auto& e : x.entries()) {
      const int i = e.index;
      Complex v = (2.0 * h / 3.0) * y.at(i);
      if (i > 0) v += (h / 6.0) * y.at(i - 1);
      if (i + 1 < nodes) v += (h / 6.0) * y.at(i + 1);
      s += std::conj(e.value) * v;
    }
    return s;
  };
  op.form = [nodes, h](const CoefficientVector& x, const CoefficientVector& y) {
    detail::check_dimension(x, nodes);
    detail::check_dimension(y, nodes);
    Complex s(0.0, 0.0);
    for (const auto& e : x.entries()) {
      const int i = e.index;
      Complex v = (2.0 / h) * y.at(i);
      if (i > 0) v -= (1.0 / h) * y.at(i - 1);
      if (i + 1 < nodes) v -= (1.0 / h) * y.at(i + 1);
      s += std::conj(e.value) * v;
    }
    return s;
  };
  std::vector<double> ref;
  for (int k = 1; k <= 64; ++k) {
    const double w = k * std::numbers::pi / length;
    ref.push_back(w * w);
  }
  op.lower_bound = ref.front();
  op.reference_spectrum = ref;
  op.eigenfunction = [length](int k, double x) {
    return std::sqrt(2.0 / length) * std::sin(k * std::numbers::pi * x / length);
  };
  op.mesh = OperatorMesh{0.0, length, nodes};
  op.description = "dirichlet laplacian on (0, " + std::to_string(length) + ")";
  return op;
}

// ---------------------------------------------------------------------------
// One-dimensional Schroedinger-type operator -u'' + V u on (-half_width,
// half_width) with Dirichlet ends, over the same hat basis.  The derivative
// term uses exact stiffness integrals; the potential term and the inner
// product both use trapezoidal quadrature on the mesh nodes.  With that
// pairing the model is exactly the classical second-difference matrix
// problem, form(X, X) >= (min sampled V) * inner(X, X) holds exactly, and
// adding a constant to V shifts every Ritz value by exactly that constant.
// Quadrature also means the discrete spectrum sits slightly below the
// continuum one, so any attached reference is flagged non-variational.
// ---------------------------------------------------------------------------

inline OperatorModel make_schrodinger_1d(std::function<double(double)> potential,
                                         double half_width, int nodes) {
  if (!(half_width > 0.0)) throw ConfigInvalid("field 'half_width': must be positive");
  if (nodes < 1) throw ConfigInvalid("field 'nodes': must be >= 1");
  const double h = 2.0 * half_width / (nodes + 1);

  auto v = std::make_shared<std::vector<double>>(nodes);
  double v_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nodes; ++i) {
    const double x = -half_width + (i + 1) * h;
    const double vi = potential(x);
    if (!std::isfinite(vi)) throw Error("potential produced a non-finite sample");
    (*v)[i] = vi;
    v_min = std::min(v_min, vi);
  }

  OperatorModel op;
  op.dim = nodes;
  op.inner = [nodes, h](const CoefficientVector& x, const CoefficientVector& y) {
    detail::check_dimension(x, nodes);
    detail::check_dimension(y, nodes);
    return h * l2_inner(x, y);
  };
  op.form = [nodes, h, v](const CoefficientVector& x, const CoefficientVector& y) {
    detail::check_dimension(x, nodes);
    detail::check_dimension(y, nodes);
    Complex s(0.0, 0.0);
    for (const auto& e : x.entries()) {
      const int i = e.index;
      Complex val = (2.0 / h + h * (*v)[i]) * y.at(i);
      if (i > 0) val -= (1.0 / h) * y.at(i - 1);
      if (i + 1 < nodes) val -= (1.0 / h) * y.at(i + 1);
      s += std::conj(e.value) * val;
    }
    return s;
  };
  op.lower_bound = v_min;
  op.variational_reference = false;
  op.mesh = OperatorMesh{-half_width, half_width, nodes};
  op.description = "schrodinger operator (" + std::to_string(nodes) + " nodes)";
  return op;
}

namespace detail {

// Normalized Hermite function: the k-th bound state of the unit harmonic
// oscillator -u'' + x^2 u, with eigenvalue 2k + 1 (k is 0-based here).
inline double hermite_state(int k, double x) {
  double h_prev = 1.0, h_curr = 2.0 * x;
  if (k == 0) h_curr = 1.0;
  for (int j = 1; j < k; ++j) {
    const double h_next = 2.0 * x * h_curr - 2.0 * j * h_prev;
    h_prev = h_curr;
    h_curr = h_next;
  }
  double log_norm = -0.25 * std::log(std::numbers::pi);
  for (int j = 1; j <= k; ++j) log_norm -= 0.5 * std::log(2.0 * j);
  return h_curr * std::exp(log_norm - 0.5 * x * x);
}

}  // namespace detail

// Registry of named potentials for configs and demos.  square_well has its
// energy origin at the well floor (0 inside |x| <= 1, 25 outside) so every
// shipped potential is non-negative.
inline OperatorModel make_schrodinger_named(const std::string& name, double half_width,
                                            int nodes) {
  if (name == "harmonic") {
    OperatorModel op = make_schrodinger_1d([](double x) { return x * x; }, half_width, nodes);
    std::vector<double> ref;
    for (int k = 1; k <= 64; ++k) ref.push_back(2.0 * k - 1.0);
    op.reference_spectrum = ref;
    op.eigenfunction = [](int k, double x) { return detail::hermite_state(k - 1, x); };
    op.description = "harmonic oscillator (" + std::to_string(nodes) + " nodes)";
    return op;
  }
  if (name == "zero") {
    OperatorModel op = make_schrodinger_1d([](double) { return 0.0; }, half_width, nodes);
    const double length = 2.0 * half_width;
    std::vector<double> ref;
    for (int k = 1; k <= 64; ++k) {
      const double w = k * std::numbers::pi / length;
      ref.push_back(w * w);
    }
    op.reference_spectrum = ref;
    op.eigenfunction = [half_width, length](int k, double x) {
      return std::sqrt(2.0 / length) * std::sin(k * std::numbers::pi * (x + half_width) / length);
    };
    op.description = "free particle in a box (" + std::to_string(nodes) + " nodes)";
    return op;
  }
  if (name == "square_well") {
    return make_schrodinger_1d([](double x) { return std::abs(x) <= 1.0 ? 0.0 : 25.0; },
                               half_width, nodes);
  }
  throw ConfigInvalid("field 'potential': unknown name '" + name +
                      "' (expected harmonic, square_well or zero)");
}

// ---------------------------------------------------------------------------
// Form-limit diagnostics for sequences of trial vectors.
//
// form_values[n-1] = form(X_n, Y_n) for n = 1..steps records the sesquilinear
// values along the pair of sequences; energy_cauchy[n-1] is the non-negative
// energy-seminorm increment form(d, d) - C * inner(d, d) for d = X_{n+1} -
// X_n.  A sequence whose increments fail to shrink is not converging in the
// energy sense, whatever its form values do.
// ---------------------------------------------------------------------------

struct VectorSequence {
  std::function<CoefficientVector(int n)> at;  // n = 1, 2, ...
  std::string description;
};

struct FormLimitReport {
  std::vector<Complex> form_values;
  std::vector<double> energy_cauchy;
};

inline FormLimitReport form_limit_check(const VectorSequence& xs, const VectorSequence& ys,
                                        const OperatorModel& op, int steps) {
  if (steps < 1) throw ConfigInvalid("field 'steps': must be >= 1");
  FormLimitReport report;
  std::vector<CoefficientVector> x_cache;
  x_cache.reserve(steps);
  for (int n = 1; n <= steps; ++n) {
    x_cache.push_back(xs.at(n));
    report.form_values.push_back(op.form(x_cache.back(), ys.at(n)));
  }
  for (int n = 1; n < steps; ++n) {
    const CoefficientVector d = x_cache[n].plus_scaled(x_cache[n - 1], Complex(-1.0, 0.0));
    const double energy = op.form(d, d).real() - op.lower_bound * op.inner(d, d).real();
    report.energy_cauchy.push_back(energy);
  }
  return report;
}

// Smallest step n such that every increment from n on is below tol, or
// nothing if the tail never settles (non-Cauchy in the energy seminorm).
inline std::optional<int> first_cauchy_step(const FormLimitReport& report, double tol) {
  const int m = static_cast<int>(report.energy_cauchy.size());
  int first = -1;
  for (int i = m - 1; i >= 0; --i) {
    if (report.energy_cauchy[i] < tol)
      first = i;
    else
      break;
  }
  if (first < 0) return std::nullopt;
  return first + 1;  // increment i sits between steps i+1 and i+2
}

}  // namespace ritzlab
