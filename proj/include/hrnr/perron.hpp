#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hrnr/error.hpp"
#include "hrnr/linalg.hpp"
#include "hrnr/matrix.hpp"
#include "hrnr/rank_range.hpp"
#include "hrnr/structure.hpp"

namespace hrnr {

struct PerronData {
  double rho = 0.0;
  std::vector<double> perron_vector;
  std::vector<cplx> max_eigenvalues;
  std::size_t q_spectral = 1;
};

struct PerronOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 100000;
  double certify = 1e-8;  // sigma_min(A - mu I) <= certify (1 + rho)
};

namespace detail {

inline void require_nonnegative_irreducible(const Matrix& a, const char* what) {
  require_square(a, what);
  if (!a.is_nonnegative()) throw NotNonnegative(std::string(what) + ": matrix must be entrywise nonnegative");
  if (!is_irreducible(a)) throw NotIrreducible(std::string(what) + ": matrix is reducible");
}

}  // namespace detail

/**
 * Perron root and vector by power iteration on A + I, which is primitive
 * for irreducible nonnegative A. The eigenvalues of maximum modulus are
 * rho e^{2 pi i t/q} with q the digraph period; each is certified by a
 * small smallest singular value of A - mu I.
 */
inline PerronData perron(const Matrix& a, const PerronOptions& opt = {}) {
  detail::require_nonnegative_irreducible(a, "perron");
  const std::size_t n = a.rows();
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a(i, j).real() + (i == j ? 1.0 : 0.0);

  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  double norm = 0.0;
  bool converged = false;
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * x[j];
      y[i] = s;
      norm += s * s;
    }
    norm = std::sqrt(norm);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] /= norm;
      diff += (y[i] - x[i]) * (y[i] - x[i]);
    }
    x.swap(y);
    if (std::sqrt(diff) <= opt.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NoConvergence("perron: power iteration did not converge");

  // Rayleigh-type estimate on the converged vector.
  double ax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * x[j];
    ax += s * s;
  }
  PerronData d;
  d.rho = std::sqrt(ax) - 1.0;
  d.perron_vector = x;
  d.q_spectral = imprimitivity_index(a);
  const double tol = opt.certify * (1.0 + d.rho);
  for (std::size_t t = 0; t < d.q_spectral; ++t) {
    const cplx mu = std::polar(d.rho, kTwoPi * static_cast<double>(t) / static_cast<double>(d.q_spectral));
    if (smallest_singular_value(a - Matrix::identity(n) * mu) > tol)
      throw NoConvergence("perron: maximal eigenvalue candidate failed the singular value check");
    d.max_eigenvalues.push_back(mu);
  }
  return d;
}

/**
 * Maximal elements of the numerical range of a nonnegative irreducible
 * matrix: q points r(A) e^{2 pi i t/q}, one on the positive real axis.
 * Anything else is returned as Generic with a diagnostic.
 */
inline MaximalSet issos_maximal_set(const Matrix& a, std::size_t samples = kDefaultSamples) {
  detail::require_nonnegative_irreducible(a, "issos_maximal_set");
  MaximaOptions opt;
  opt.samples = samples;
  auto s = maximal_elements(a, 1, opt);
  if (const auto* f = std::get_if<FiniteSet>(&s); f != nullptr && f->nearest_base != 0.0)
    return GenericSet{f->radius, f->points, "no maximal element on the positive real axis"};
  return s;
}

/// Unit top eigenvector of H(A) with positive entries. Throws NonPositiveVector.
inline std::vector<double> issos_positive_vector(const Matrix& a) {
  detail::require_nonnegative_irreducible(a, "issos_positive_vector");
  const auto eg = eigh(hermitian_part(a));
  const std::size_t n = a.rows();
  // Fix the phase so the largest-modulus entry is real positive.
  std::size_t big = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(eg.vectors(i, 0)) > std::abs(eg.vectors(big, 0))) big = i;
  const cplx phase = std::conj(eg.vectors(big, 0)) / std::abs(eg.vectors(big, 0));
  std::vector<double> x(n);
  const double tol = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx v = eg.vectors(i, 0) * phase;
    if (std::abs(v.imag()) > 1e-9 || v.real() <= tol)
      throw NonPositiveVector("issos_positive_vector: top eigenvector of H(A) is not positive");
    x[i] = v.real();
  }
  return x;
}

}  // namespace hrnr
