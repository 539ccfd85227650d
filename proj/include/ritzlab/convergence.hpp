#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coefficient_vector.hpp"
#include "errors.hpp"
#include "hermitian.hpp"
#include "operator_model.hpp"
#include "ritz.hpp"

namespace ritzlab {

// ---------------------------------------------------------------------------
// An approximating family supplies, for each step n, trial vectors
// X_{1,n} ... X_{m,n} aimed at the lowest m spectral values of an operator.
// Step n's small space spans exactly those m vectors; the pooled space spans
// every vector from steps 1..n.  Both k and n are 1-based.
// ---------------------------------------------------------------------------

struct ApproximatingFamily {
  int m = 0;
  std::function<CoefficientVector(int k, int n)> vector;
  std::string description;
};

// Family of coordinate truncations of the operator's exact eigenvectors:
// X_{k,n} keeps the first n coordinates of the k-th eigenvector.
inline ApproximatingFamily family_truncation(const OperatorModel& op, int m) {
  if (m < 1) throw ConfigInvalid("field 'm': must be >= 1");
  if (!op.eigenvector_rule)
    throw Unsupported("operator does not expose coordinate eigenvectors; "
                      "truncation family unavailable");
  ApproximatingFamily fam;
  fam.m = m;
  fam.vector = [rule = op.eigenvector_rule, m](int k, int n) {
    if (k < 1 || k > m) throw RankOutOfRange("family rank " + std::to_string(k));
    if (n < 1) throw IndexOutOfRange("family step " + std::to_string(n));
    return rule(k, n);
  };
  fam.description = "coordinate truncation of exact eigenvectors (m = " +
                    std::to_string(m) + ")";
  return fam;
}

// Family of nodal interpolations of the operator's continuum eigenfunctions
// onto dyadically refined sub-meshes.  Step n uses 2^n - 1 interior coarse
// nodes (saturating at the operator's own mesh), whose nodal values are then
// carried to the fine mesh by linear interpolation.  Requires the fine mesh
// to have a power of two intervals so the coarse meshes are nested in it.
inline ApproximatingFamily family_mesh_interpolation(const OperatorModel& op, int m) {
  if (m < 1) throw ConfigInvalid("field 'm': must be >= 1");
  if (!op.eigenfunction || !op.mesh)
    throw Unsupported("operator does not expose mesh eigenfunctions; "
                      "interpolation family unavailable");
  const OperatorMesh mesh = *op.mesh;
  const int intervals = mesh.nodes + 1;
  int levels = 0;
  while ((1 << (levels + 1)) <= intervals) ++levels;
  if ((1 << levels) != intervals)
    throw Unsupported("mesh interpolation needs a power-of-two interval count, got " +
                      std::to_string(intervals));

  ApproximatingFamily fam;
  fam.m = m;
  fam.vector = [fn = op.eigenfunction, mesh, levels, m](int k, int n) {
    if (k < 1 || k > m) throw RankOutOfRange("family rank " + std::to_string(k));
    if (n < 1) throw IndexOutOfRange("family step " + std::to_string(n));
    const int level = std::min(n, levels);
    const int coarse_intervals = 1 << level;
    const int ratio = 1 << (levels - level);
    const double coarse_h = (mesh.b - mesh.a) / coarse_intervals;

    // Nodal values on the coarse mesh, zero at the Dirichlet ends.
    std::vector<double> coarse(coarse_intervals + 1, 0.0);
    for (int j = 1; j < coarse_intervals; ++j)
      coarse[j] = fn(k, mesh.a + j * coarse_h);

    std::vector<CoefficientVector::Entry> entries;
    entries.reserve(mesh.nodes);
    for (int p = 1; p <= mesh.nodes; ++p) {
      const int q = p / ratio;
      const int rem = p % ratio;
      const double frac = static_cast<double>(rem) / ratio;
      const double value = (1.0 - frac) * coarse[q] + frac * coarse[q + 1];
      if (value != 0.0) entries.push_back({p - 1, Complex(value, 0.0)});
    }
    return CoefficientVector(std::move(entries));
  };
  fam.description = "nodal interpolation on dyadic sub-meshes (m = " +
                    std::to_string(m) + ")";
  return fam;
}

// Family whose step-n vectors are the operator's own discrete eigenvectors,
// computed once (lazily) by projecting onto the full coordinate basis.  The
// family is constant in n; it exists to pin studies against the best answer
// the discretization itself can give.
inline ApproximatingFamily family_discrete_oracle(const OperatorModel& op, int m) {
  if (m < 1) throw ConfigInvalid("field 'm': must be >= 1");
  if (!op.dim)
    throw Unsupported("operator dimension unknown; discrete oracle family unavailable");
  if (m > *op.dim)
    throw ConfigInvalid("field 'm': exceeds operator dimension " + std::to_string(*op.dim));

  struct State {
    std::once_flag once;
    std::vector<CoefficientVector> vectors;
  };
  auto state = std::make_shared<State>();
  auto model = std::make_shared<OperatorModel>(op);
  const int dim = *op.dim;

  ApproximatingFamily fam;
  fam.m = m;
  fam.vector = [state, model, dim, m](int k, int n) {
    if (k < 1 || k > m) throw RankOutOfRange("family rank " + std::to_string(k));
    if (n < 1) throw IndexOutOfRange("family step " + std::to_string(n));
    std::call_once(state->once, [&] {
      TrialBasis canonical;
      canonical.reserve(dim);
      for (int i = 0; i < dim; ++i) canonical.push_back(CoefficientVector::unit(i));
      const RitzSpectrum full = ritz_spectrum(canonical, *model);
      state->vectors.reserve(m);
      for (int col = 0; col < m; ++col)
        state->vectors.push_back(expand_combination(canonical, full.vectors, col));
    });
    return state->vectors[k - 1];
  };
  fam.description = "discrete eigenvectors of the full coordinate basis (m = " +
                    std::to_string(m) + ")";
  return fam;
}

// ---------------------------------------------------------------------------
// Pooled basis: every X_{k,s} for s = 1..n in insertion order (step outer,
// rank inner), with vectors that add nothing new pruned as they arrive.  A
// candidate is dropped when its residual against the span of the kept ones
// falls below prune_tol times its own length (zero vectors always drop).
// Pruning decisions only ever look backwards, so the pooled basis at step n
// is a prefix of the pooled basis at step n + 1; projected values can then
// only descend as n grows.
// ---------------------------------------------------------------------------

inline TrialBasis build_pooled_basis(const ApproximatingFamily& family, int n,
                                     double prune_tol = 1e-8) {
  if (n < 1) throw IndexOutOfRange("pooled step " + std::to_string(n));
  if (!(prune_tol >= 0.0)) throw ConfigInvalid("field 'prune_tol': must be >= 0");
  TrialBasis kept;
  std::vector<CoefficientVector> ortho;  // normalized residuals of the kept vectors
  for (int s = 1; s <= n; ++s) {
    for (int k = 1; k <= family.m; ++k) {
      CoefficientVector x = family.vector(k, s);
      const double orig = l2_norm(x);
      if (!(orig > 0.0)) continue;
      CoefficientVector r = x;
      for (int pass = 0; pass < 2; ++pass)
        for (const CoefficientVector& u : ortho)
          r = r.plus_scaled(u, -l2_inner(u, r));
      const double res = l2_norm(r);
      if (res < prune_tol * orig) continue;
      ortho.push_back(r.scaled(Complex(1.0 / res, 0.0)));
      kept.push_back(std::move(x));
    }
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Study driver.  For each step n it solves two projected problems:
//
//   pooled   over span{X_{k,s} : k <= m, s <= n}  ->  mu_hat (first m values)
//   small    over span{X_{1,n} ... X_{m,n}}       ->  lambda_hat
//
// The pooled space contains the small one, so mu_hat_k <= lambda_hat_k; when
// the operator carries a variational reference, lambda_k <= mu_hat_k as well,
// and the pair brackets the true value.  Early steps may have genuinely
// dependent small bases (a truncated eigenvector can vanish); those steps are
// recorded with the small side skipped rather than aborting the study.
// ---------------------------------------------------------------------------

struct StudyRecord {
  int n = 0;
  int pooled_dim = 0;
  std::vector<double> mu_hat;      // first min(m, pooled_dim) pooled values
  bool small_ok = false;
  std::vector<double> lambda_hat;  // m values when small_ok
  std::vector<double> errors;      // |mu_hat_k - reference_k| when a reference exists
  bool sandwich_ok = true;
  double gram_cond_pooled = 0.0;
  double gram_cond_small = 0.0;
};

struct ConvergenceReport {
  int m = 0;
  double target_tol = 0.0;
  std::optional<std::vector<double>> reference;
  bool variational_reference = false;
  std::vector<StudyRecord> records;
  std::vector<int> converged_at;  // per rank: first settled step, or -1
  std::vector<int> skipped_steps;
  bool monotone_ok = true;
  bool all_sandwich_ok = true;
  std::string operator_description;
  std::string family_description;
};

inline ConvergenceReport run_study(const OperatorModel& op,
                                   const ApproximatingFamily& family, int m, int steps,
                                   double target_tol = 1e-6, double prune_tol = 1e-8,
                                   int threads = 1) {
  if (m < 1) throw ConfigInvalid("field 'm': must be >= 1");
  if (m > family.m)
    throw ConfigInvalid("field 'm': exceeds family width " + std::to_string(family.m));
  if (steps < 1) throw ConfigInvalid("field 'steps': must be >= 1");
  if (!(target_tol > 0.0)) throw ConfigInvalid("field 'target_tol': must be positive");

  ConvergenceReport report;
  report.m = m;
  report.target_tol = target_tol;
  report.reference = op.reference_spectrum;
  report.variational_reference = op.variational_reference;
  report.operator_description = op.description;
  report.family_description = family.description;

  // Below the essential spectrum only finitely many eigenvalues exist; a
  // study asking for more than the reference provides there is ill-posed.
  if (op.ess_inf && report.reference) {
    int below = 0;
    for (double v : *report.reference)
      if (v < *op.ess_inf) ++below;
    if (m > below)
      throw ConfigInvalid("field 'm': only " + std::to_string(below) +
                          " reference eigenvalues lie below the essential spectrum");
  }

  for (int n = 1; n <= steps; ++n) {
    StudyRecord rec;
    rec.n = n;

    const TrialBasis pooled = build_pooled_basis(family, n, prune_tol);
    if (pooled.empty()) throw EmptyBasis();
    const RitzSpectrum pooled_rs = ritz_spectrum(pooled, op, threads);
    rec.pooled_dim = static_cast<int>(pooled.size());
    const int avail = std::min<int>(m, rec.pooled_dim);
    rec.mu_hat.assign(pooled_rs.values.begin(), pooled_rs.values.begin() + avail);
    rec.gram_cond_pooled = pooled_rs.gram_condition;

    TrialBasis small;
    small.reserve(m);
    for (int k = 1; k <= m; ++k) small.push_back(family.vector(k, n));
    try {
      const RitzSpectrum small_rs = ritz_spectrum(small, op, threads);
      rec.small_ok = true;
      rec.lambda_hat = small_rs.values;
      rec.gram_cond_small = small_rs.gram_condition;
    } catch (const GramDegenerate&) {
      // The step-n vectors themselves are dependent (common at small n, where
      // truncation can collapse a vector).  The pooled side still stands; the
      // small side is marked skipped for this step.
      rec.small_ok = false;
      rec.gram_cond_small = std::numeric_limits<double>::quiet_NaN();
      report.skipped_steps.push_back(n);
    }

    for (int k = 0; k < avail; ++k) {
      const double mu = rec.mu_hat[k];
      if (rec.small_ok) {
        const double lam = rec.lambda_hat[k];
        if (mu > lam + 1e-10 * std::max(1.0, std::abs(lam))) rec.sandwich_ok = false;
      }
      if (report.reference && report.variational_reference &&
          k < static_cast<int>(report.reference->size())) {
        const double ref = (*report.reference)[k];
        if (mu < ref - 1e-10 * std::max(1.0, std::abs(ref))) rec.sandwich_ok = false;
      }
    }
    if (report.reference) {
      const int upto = std::min<int>(avail, static_cast<int>(report.reference->size()));
      for (int k = 0; k < upto; ++k)
        rec.errors.push_back(std::abs(rec.mu_hat[k] - (*report.reference)[k]));
    }

    report.all_sandwich_ok = report.all_sandwich_ok && rec.sandwich_ok;
    report.records.push_back(std::move(rec));
  }

  // Pooled values must descend with n (nested spaces); confirm rather than trust.
  for (std::size_t i = 0; i + 1 < report.records.size(); ++i) {
    const auto& a = report.records[i].mu_hat;
    const auto& b = report.records[i + 1].mu_hat;
    for (std::size_t k = 0; k < a.size() && k < b.size(); ++k)
      if (b[k] > a[k] + 1e-10 * std::max(1.0, std::abs(a[k])))
        report.monotone_ok = false;
  }

  // Convergence step per rank: the first n from which the error stays within
  // target_tol through the end of the study.  Without a reference the final
  // pooled values stand in for the limit.
  const std::vector<double>* target = nullptr;
  std::vector<double> fallback;
  if (report.reference) {
    target = &*report.reference;
  } else {
    fallback = report.records.back().mu_hat;
    target = &fallback;
  }
  report.converged_at.assign(m, -1);
  for (int k = 0; k < m; ++k) {
    if (k >= static_cast<int>(target->size())) continue;
    int first = -1;
    for (int i = static_cast<int>(report.records.size()) - 1; i >= 0; --i) {
      const auto& rec = report.records[i];
      const bool good = k < static_cast<int>(rec.mu_hat.size()) &&
                        std::abs(rec.mu_hat[k] - (*target)[k]) <= target_tol;
      if (good)
        first = rec.n;
      else
        break;
    }
    report.converged_at[k] = first;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Limit diagnostics: compare the step-n Gram and form matrices of a family
// against claimed limit matrices, entrywise and through determinants.
// ---------------------------------------------------------------------------

struct GramLimitReport {
  std::vector<double> gram_deviation;  // per step: max |G^(n)_ij - G_ij|
  std::vector<double> form_deviation;  // per step: max |H^(n)_ij - H_ij|
  std::vector<double> gram_det;        // per step: det G^(n)
  double gram_limit_det = 0.0;
};

namespace detail {

inline double hermitian_det(const HermitianMatrix& a) {
  double det = 1.0;
  for (double v : eigen_hermitian(a).values) det *= v;
  return det;
}

}  // namespace detail

inline GramLimitReport gram_limit_check(const ApproximatingFamily& family,
                                        const OperatorModel& op,
                                        const HermitianMatrix& gram_limit,
                                        const HermitianMatrix& form_limit, int steps) {
  if (steps < 1) throw ConfigInvalid("field 'steps': must be >= 1");
  if (gram_limit.dim() != family.m || form_limit.dim() != family.m)
    throw DimensionMismatch("limit matrices must be " + std::to_string(family.m) + " x " +
                            std::to_string(family.m));
  GramLimitReport report;
  report.gram_limit_det = detail::hermitian_det(gram_limit);
  for (int n = 1; n <= steps; ++n) {
    TrialBasis basis;
    basis.reserve(family.m);
    for (int k = 1; k <= family.m; ++k) basis.push_back(family.vector(k, n));
    const HermitianMatrix g = assemble_gram(basis, op);
    const HermitianMatrix h = assemble_form_matrix(basis, op);
    double gdev = 0.0, hdev = 0.0;
    for (int i = 0; i < family.m; ++i)
      for (int j = 0; j < family.m; ++j) {
        gdev = std::max(gdev, std::abs(g(i, j) - gram_limit(i, j)));
        hdev = std::max(hdev, std::abs(h(i, j) - form_limit(i, j)));
      }
    report.gram_deviation.push_back(gdev);
    report.form_deviation.push_back(hdev);
    report.gram_det.push_back(detail::hermitian_det(g));
  }
  return report;
}

// ---------------------------------------------------------------------------
// CSV serialization of a study.  Numbers are written in shortest
// round-trippable form, so equal runs produce byte-identical files.  Cells
// are left blank where a step has nothing to report (missing pooled ranks,
// skipped small problems, absent references).
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline void write_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "n,pooled_dim";
  for (int k = 1; k <= report.m; ++k) out << ",mu_hat_" << k;
  for (int k = 1; k <= report.m; ++k) out << ",lambda_hat_" << k;
  for (int k = 1; k <= report.m; ++k) out << ",err_" << k;
  out << ",sandwich_ok,gram_cond_pooled,gram_cond_small\n";
  for (const StudyRecord& rec : report.records) {
    out << rec.n << ',' << rec.pooled_dim;
    for (int k = 0; k < report.m; ++k) {
      out << ',';
      if (k < static_cast<int>(rec.mu_hat.size()))
        out << detail::format_double(rec.mu_hat[k]);
    }
    for (int k = 0; k < report.m; ++k) {
      out << ',';
      if (rec.small_ok && k < static_cast<int>(rec.lambda_hat.size()))
        out << detail::format_double(rec.lambda_hat[k]);
    }
    for (int k = 0; k < report.m; ++k) {
      out << ',';
      if (k < static_cast<int>(rec.errors.size()))
        out << detail::format_double(rec.errors[k]);
    }
    out << ',' << (rec.sandwich_ok ? 1 : 0);
    out << ',' << detail::format_double(rec.gram_cond_pooled);
    out << ',';
    if (rec.small_ok) out << detail::format_double(rec.gram_cond_small);
    out << '\n';
  }
}

}  // namespace ritzlab
