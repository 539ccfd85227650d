#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <vector>

#include "errors.hpp"

namespace ritzlab {

using Complex = std::complex<double>;

inline bool is_finite(Complex v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// ---------------------------------------------------------------------------
// Dense complex matrix, row-major.  Deliberately minimal: the library only
// ever handles small dense blocks (trial-space Gram/form matrices, compressed
// operators), so there is no sparse or expression machinery here.
// ---------------------------------------------------------------------------

class ComplexMatrix {
 public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Complex& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  Complex operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  std::vector<Complex> column(int j) const {
    std::vector<Complex> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  bool operator==(const ComplexMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  int rows_, cols_;
  std::vector<Complex> data_;
};

inline ComplexMatrix identity_matrix(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

// ---------------------------------------------------------------------------
// Hermitian matrix with enforced invariants: square, finite entries, exactly
// Hermitian storage.  Construction from a dense matrix symmetrizes by
// averaging with the conjugate transpose, so entries assembled in slightly
// asymmetric floating point land on the nearest Hermitian matrix; the
// imaginary parts of the diagonal are dropped outright.
// ---------------------------------------------------------------------------

class HermitianMatrix {
 public:
  explicit HermitianMatrix(int dim) : dim_(dim), a_(dim, dim) {
    if (dim < 1) throw Error("hermitian matrix dimension must be at least 1");
  }

  explicit HermitianMatrix(const ComplexMatrix& dense)
      : dim_(dense.rows()), a_(dense.rows(), dense.rows()) {
    if (dense.rows() != dense.cols())
      throw DimensionMismatch("hermitian matrix must be square");
    if (dense.rows() < 1) throw Error("hermitian matrix dimension must be at least 1");
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        if (!is_finite(dense(i, j)))
          throw Error("non-finite matrix entry at (" + std::to_string(i) + ", " +
                      std::to_string(j) + ")");
    for (int i = 0; i < dim_; ++i) {
      a_(i, i) = dense(i, i).real();
      for (int j = i + 1; j < dim_; ++j) {
        const Complex v = 0.5 * (dense(i, j) + std::conj(dense(j, i)));
        a_(i, j) = v;
        a_(j, i) = std::conj(v);
      }
    }
  }

  // Row-wise literal, handy in tests: HermitianMatrix::from_rows({{2, -1}, {-1, 2}}).
  static HermitianMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const int n = static_cast<int>(rows.size());
    ComplexMatrix d(n, n);
    int i = 0;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != n)
        throw DimensionMismatch("hermitian matrix must be square");
      int j = 0;
      for (Complex v : row) d(i, j++) = v;
      ++i;
    }
    return HermitianMatrix(d);
  }

  int dim() const { return dim_; }
  Complex operator()(int i, int j) const { return a_(i, j); }

  // Writes the Hermitian pair (i,j)/(j,i) together so storage stays Hermitian.
  void set(int i, int j, Complex v) {
    if (!is_finite(v)) throw Error("non-finite matrix entry");
    if (i == j) {
      a_(i, i) = v.real();
    } else {
      a_(i, j) = v;
      a_(j, i) = std::conj(v);
    }
  }

  const ComplexMatrix& dense() const { return a_; }

 private:
  int dim_;
  ComplexMatrix a_;
};

inline double max_abs(const HermitianMatrix& m) {
  double r = 0.0;
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

inline double frobenius_norm(const HermitianMatrix& m) {
  double s = 0.0;
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) s += std::norm(m(i, j));
  return std::sqrt(s);
}

inline double trace_real(const HermitianMatrix& m) {
  double s = 0.0;
  for (int i = 0; i < m.dim(); ++i) s += m(i, i).real();
  return s;
}

inline std::vector<Complex> matrix_apply(const HermitianMatrix& m, const std::vector<Complex>& x) {
  std::vector<Complex> y(m.dim(), Complex(0.0, 0.0));
  for (int i = 0; i < m.dim(); ++i) {
    Complex acc(0.0, 0.0);
    for (int j = 0; j < m.dim(); ++j) acc += m(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

inline double norm2(const std::vector<Complex>& x) {
  double s = 0.0;
  for (Complex v : x) s += std::norm(v);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Cholesky factorization G = L * L^H for Hermitian positive definite G.
//
// A pivot at or below 1e-13 relative to the largest diagonal entry raises
// NotPositiveDefinite carrying the pivot index and value; callers building
// Gram matrices use that index to name the offending trial vector.
// ---------------------------------------------------------------------------

inline ComplexMatrix cholesky(const HermitianMatrix& g) {
  const int n = g.dim();
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, g(i, i).real());
  const double pivot_floor = 1e-13 * std::max(max_diag, 1e-300);

  ComplexMatrix l(n, n);
  for (int j = 0; j < n; ++j) {
    double pivot = g(j, j).real();
    for (int k = 0; k < j; ++k) pivot -= std::norm(l(j, k));
    if (!(pivot > pivot_floor)) throw NotPositiveDefinite(j, pivot);
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      Complex v = g(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * std::conj(l(j, k));
      l(i, j) = v / ljj;
    }
  }
  return l;
}

// Solve L * X = B (L lower triangular), column by column.
inline ComplexMatrix forward_solve(const ComplexMatrix& l, const ComplexMatrix& b) {
  const int n = l.rows();
  ComplexMatrix x(n, b.cols());
  for (int c = 0; c < b.cols(); ++c) {
    for (int i = 0; i < n; ++i) {
      Complex v = b(i, c);
      for (int k = 0; k < i; ++k) v -= l(i, k) * x(k, c);
      x(i, c) = v / l(i, i);
    }
  }
  return x;
}

// Solve L^H * X = B (upper triangular adjoint), column by column.
inline ComplexMatrix adjoint_solve(const ComplexMatrix& l, const ComplexMatrix& b) {
  const int n = l.rows();
  ComplexMatrix x(n, b.cols());
  for (int c = 0; c < b.cols(); ++c) {
    for (int i = n - 1; i >= 0; --i) {
      Complex v = b(i, c);
      for (int k = i + 1; k < n; ++k) v -= std::conj(l(k, i)) * x(k, c);
      x(i, c) = v / std::conj(l(i, i));
    }
  }
  return x;
}

inline ComplexMatrix conjugate_transpose(const ComplexMatrix& m) {
  ComplexMatrix t(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t(j, i) = std::conj(m(i, j));
  return t;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition by cyclic Jacobi rotations.
//
// Each rotation annihilates one off-diagonal pair with a complex plane
// rotation; sweeps repeat in a fixed order until the off-diagonal Frobenius
// norm drops below 1e-13 of the input's, which leaves eigenpair residuals
// well under 1e-10 * max|A| for any dimension this library touches.  The
// sweep cap turns stagnation into ConvergenceFailure instead of a hang.
//
// Output is deterministic: fixed rotation order, ascending stable sort, and
// each eigenvector's phase normalized so its largest-modulus entry is real
// and positive.
// ---------------------------------------------------------------------------

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k pairs with values[k]
  double residual = 0.0;       // max_k |A v_k - values[k] v_k|_2
};

namespace detail {

inline double offdiag_norm(const ComplexMatrix& m) {
  double s = 0.0;
  const int n = m.rows();
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) s += std::norm(m(p, q));
  return std::sqrt(2.0 * s);
}

}  // namespace detail

inline EigenDecomposition eigen_hermitian(const HermitianMatrix& a, int max_sweeps = 100) {
  const int n = a.dim();
  ComplexMatrix m = a.dense();
  ComplexMatrix v = identity_matrix(n);
  const double off_tol = std::max(1e-13 * frobenius_norm(a), 1e-300);

  int sweeps = 0;
  while (detail::offdiag_norm(m) > off_tol) {
    if (sweeps >= max_sweeps) throw ConvergenceFailure(sweeps);
    ++sweeps;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex gamma = m(p, q);
        const double ag = std::abs(gamma);
        if (ag < 1e-300) {
          m(p, q) = 0.0;
          m(q, p) = 0.0;
          continue;
        }
        const double alpha = m(p, p).real();
        const double beta = m(q, q).real();
        const Complex phase = gamma / ag;
        const double tau = (beta - alpha) / (2.0 * ag);
        double t;
        if (std::abs(tau) > 1e15) {
          t = 1.0 / (2.0 * tau);
        } else {
          const double sgn = (tau >= 0.0) ? 1.0 : -1.0;
          t = sgn / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const Complex s = (t * c) * phase;

        // Columns p and q of A and of the accumulated vectors pick up the
        // rotation; rows follow by Hermitian symmetry.
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const Complex mrp = m(r, p);
          const Complex mrq = m(r, q);
          const Complex new_rp = c * mrp - std::conj(s) * mrq;
          const Complex new_rq = s * mrp + c * mrq;
          m(r, p) = new_rp;
          m(p, r) = std::conj(new_rp);
          m(r, q) = new_rq;
          m(q, r) = std::conj(new_rq);
        }
        m(p, p) = alpha - t * ag;
        m(q, q) = beta + t * ag;
        m(p, q) = 0.0;
        m(q, p) = 0.0;

        for (int r = 0; r < n; ++r) {
          const Complex vrp = v(r, p);
          const Complex vrq = v(r, q);
          v(r, p) = c * vrp - std::conj(s) * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return m(i, i).real() < m(j, j).real(); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = m(order[k], order[k]).real();
    // Phase convention: largest-modulus entry real and positive.
    int top = 0;
    double top_abs = 0.0;
    for (int r = 0; r < n; ++r) {
      const double a_r = std::abs(v(r, order[k]));
      if (a_r > top_abs) {
        top_abs = a_r;
        top = r;
      }
    }
    Complex phase(1.0, 0.0);
    if (top_abs > 0.0) phase = std::conj(v(top, order[k])) / top_abs;
    for (int r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]) * phase;
  }

  double residual = 0.0;
  for (int k = 0; k < n; ++k) {
    std::vector<Complex> col = out.vectors.column(k);
    std::vector<Complex> av = matrix_apply(a, col);
    for (int r = 0; r < n; ++r) av[r] -= out.values[k] * col[r];
    residual = std::max(residual, norm2(av));
  }
  out.residual = residual;
  return out;
}

// ---------------------------------------------------------------------------
// Generalized Hermitian eigenproblem H v = lambda G v with G positive
// definite, reduced through the Cholesky factor: with G = L L^H the problem
// becomes the ordinary Hermitian one for L^-1 H L^-H, whose eigenvectors are
// mapped back through L^-H.  G^-1 H is never formed.  Returned vectors are
// G-orthonormal.
// ---------------------------------------------------------------------------

inline EigenDecomposition eigen_generalized(const HermitianMatrix& h,
                                            const HermitianMatrix& g,
                                            int max_sweeps = 100) {
  if (h.dim() != g.dim())
    throw DimensionMismatch("pencil matrices have different dimensions: " +
                            std::to_string(h.dim()) + " vs " + std::to_string(g.dim()));
  const int n = h.dim();
  const ComplexMatrix l = cholesky(g);
  const ComplexMatrix w = forward_solve(l, h.dense());          // L^-1 H
  const ComplexMatrix z = forward_solve(l, conjugate_transpose(w));
  const HermitianMatrix b(conjugate_transpose(z));               // L^-1 H L^-H

  EigenDecomposition inner = eigen_hermitian(b, max_sweeps);
  EigenDecomposition out;
  out.values = inner.values;
  out.vectors = adjoint_solve(l, inner.vectors);                 // L^-H U

  double residual = 0.0;
  for (int k = 0; k < n; ++k) {
    std::vector<Complex> col = out.vectors.column(k);
    std::vector<Complex> hv = matrix_apply(h, col);
    std::vector<Complex> gv = matrix_apply(g, col);
    for (int r = 0; r < n; ++r) hv[r] -= out.values[k] * gv[r];
    residual = std::max(residual, norm2(hv));
  }
  out.residual = residual;
  return out;
}

// Spectral condition number estimate for a Hermitian matrix expected to be
// positive definite; +infinity if the smallest eigenvalue is not positive.
inline double condition_estimate(const HermitianMatrix& g) {
  const EigenDecomposition e = eigen_hermitian(g);
  const double lo = e.values.front();
  const double hi = e.values.back();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace ritzlab
