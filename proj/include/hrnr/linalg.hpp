#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "hrnr/error.hpp"
#include "hrnr/matrix.hpp"

namespace hrnr {

/// Spectral decomposition of a Hermitian matrix. Eigenvalues descending;
/// column j of `vectors` pairs with `values[j]`.
struct HermitianEigen {
  std::vector<double> values;
  Matrix vectors;
};

/// Hermitian-input validation threshold: 1e-10 * (1 + max|a_ij|).
inline double hermitian_tolerance(const Matrix& a) { return 1e-10 * (1.0 + a.max_abs()); }

/// (A + A*)/2, Hermitian by construction.
inline Matrix hermitian_part(const Matrix& a) {
  require_square(a, "hermitian_part");
  const std::size_t n = a.rows();
  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = 0.5 * (a(i, j) + std::conj(a(j, i)));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

/// Entrywise multiplication by e^{i theta}.
inline Matrix rotate(const Matrix& a, double theta) { return a * std::polar(1.0, theta); }

inline double hermitian_defect(const Matrix& h) {
  double d = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i; j < h.cols(); ++j) d = std::max(d, std::abs(h(i, j) - std::conj(h(j, i))));
  return d;
}

namespace detail {

constexpr int kMaxJacobiSweeps = 100;

// Cyclic Jacobi on a Hermitian matrix stored row-major in `a` (overwritten).
// Rotations are applied in fixed (p, q) order. When `v` is non-null it
// accumulates the unitary so that H = V diag(a) V*.
inline void jacobi_hermitian(std::vector<cplx>& a, std::size_t n, std::vector<cplx>* v) {
  auto at = [&](std::size_t i, std::size_t j) -> cplx& { return a[i * n + j]; };
  double frob2 = 0.0;
  for (const auto& z : a) frob2 += std::norm(z);
  if (frob2 == 0.0) return;
  const double stop2 = frob2 * 1e-30;

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off2 = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off2 += std::norm(at(p, q));
    if (off2 <= stop2) return;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = at(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const double app = at(p, p).real();
        const double aqq = at(q, q).real();
        // Negligible relative to both diagonal entries: drop it.
        if (sweep > 3 && std::abs(app) + 100.0 * r == std::abs(app) && std::abs(aqq) + 100.0 * r == std::abs(aqq)) {
          at(p, q) = 0.0;
          at(q, p) = 0.0;
          continue;
        }
        const cplx phase = apq / r;  // e^{i phi}
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // U = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on (p, q); H <- U* H U.
        const cplx sp = s * phase;
        const cplx spc = std::conj(sp);
        for (std::size_t i = 0; i < n; ++i) {
          const cplx hip = at(i, p);
          const cplx hiq = at(i, q);
          at(i, p) = c * hip - spc * hiq;
          at(i, q) = sp * hip + c * hiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const cplx hpj = at(p, j);
          const cplx hqj = at(q, j);
          at(p, j) = c * hpj - sp * hqj;
          at(q, j) = spc * hpj + c * hqj;
        }
        at(p, p) = app - t * r;
        at(q, q) = aqq + t * r;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        if (v != nullptr) {
          auto& vv = *v;
          for (std::size_t i = 0; i < n; ++i) {
            const cplx vip = vv[i * n + p];
            const cplx viq = vv[i * n + q];
            vv[i * n + p] = c * vip - spc * viq;
            vv[i * n + q] = sp * vip + c * viq;
          }
        }
      }
    }
  }
  throw NoConvergence("Jacobi eigensolver did not converge");
}

inline void validate_hermitian(const Matrix& h, const char* what) {
  require_square(h, what);
  if (!h.all_finite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
  if (hermitian_defect(h) > hermitian_tolerance(h)) throw NotHermitian(std::string(what) + ": input is not Hermitian");
}

inline std::vector<cplx> symmetrized(const Matrix& h) {
  const std::size_t n = h.rows();
  std::vector<cplx> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = h(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = 0.5 * (h(i, j) + std::conj(h(j, i)));
      a[i * n + j] = v;
      a[j * n + i] = std::conj(v);
    }
  }
  return a;
}

// Householder reduction of a Hermitian matrix (row-major, overwritten) to a
// real symmetric tridiagonal with the same spectrum: diagonal d, off-diagonal
// magnitudes e (e[i] couples i and i+1).
inline void hermitian_tridiagonal(std::vector<cplx>& a, std::size_t n, std::vector<double>& d, std::vector<double>& e) {
  auto at = [&](std::size_t i, std::size_t j) -> cplx& { return a[i * n + j]; };
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  std::vector<cplx> v(n), p(n);
  for (std::size_t j = 0; j + 2 < n; ++j) {
    const std::size_t lo = j + 1;
    double norm2 = 0.0;
    for (std::size_t i = lo; i < n; ++i) norm2 += std::norm(at(i, j));
    const double xnorm = std::sqrt(norm2);
    if (xnorm == 0.0) continue;
    const cplx x0 = at(lo, j);
    const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0, 0.0} : x0 / std::abs(x0);
    const cplx alpha = -phase * xnorm;
    // v = x - alpha e1, normalised.
    for (std::size_t i = lo; i < n; ++i) v[i] = at(i, j);
    v[lo] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = lo; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    const double inv = 1.0 / std::sqrt(vnorm2);
    for (std::size_t i = lo; i < n; ++i) v[i] *= inv;
    // B <- B - 2 v q* - 2 q v*, q = Bv - (v*Bv) v.
    double kappa = 0.0;
    for (std::size_t i = lo; i < n; ++i) {
      cplx s = 0.0;
      for (std::size_t l = lo; l < n; ++l) s += at(i, l) * v[l];
      p[i] = s;
    }
    for (std::size_t i = lo; i < n; ++i) kappa += (std::conj(v[i]) * p[i]).real();
    for (std::size_t i = lo; i < n; ++i) p[i] -= kappa * v[i];
    for (std::size_t i = lo; i < n; ++i)
      for (std::size_t l = lo; l < n; ++l) at(i, l) -= 2.0 * (v[i] * std::conj(p[l]) + p[i] * std::conj(v[l]));
    at(lo, j) = alpha;
    at(j, lo) = std::conj(alpha);
    for (std::size_t i = lo + 1; i < n; ++i) at(i, j) = at(j, i) = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = std::abs(at(i + 1, i));
}

// Number of eigenvalues of the symmetric tridiagonal (d, e) strictly below x.
inline std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x, double pivmin) {
  std::size_t count = 0;
  double q = d[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    q = d[i] - x - e[i - 1] * e[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

// k-th largest eigenvalue (1-based) of a symmetric tridiagonal by bisection.
inline double tridiagonal_kth_largest(const std::vector<double>& d, const std::vector<double>& e, std::size_t k) {
  const std::size_t n = d.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double emax2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? e[i - 1] : 0.0) + (i + 1 < n ? e[i] : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
    if (i + 1 < n) emax2 = std::max(emax2, e[i] * e[i]);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  const double pivmin = std::max(std::numeric_limits<double>::min(), emax2 * std::numeric_limits<double>::min()) +
                        scale * 1e-300;
  const double eps = std::numeric_limits<double>::epsilon();
  lo -= 2.0 * eps * scale + pivmin;
  hi += 2.0 * eps * scale + pivmin;
  // The k-th largest is the (n-k+1)-th smallest: count(x) <= n-k  <=>  x <= it.
  const std::size_t below = n - k;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin || mid == lo || mid == hi) break;
    if (sturm_count(d, e, mid, pivmin) <= below)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/**
 * Full eigendecomposition of a Hermitian matrix by cyclic Jacobi.
 *
 * Deterministic for a fixed input. Throws NotHermitian when
 * max|H - H*| exceeds hermitian_tolerance(H), NoConvergence after
 * 100 sweeps.
 */
inline HermitianEigen eigh(const Matrix& h) {
  detail::validate_hermitian(h, "eigh");
  const std::size_t n = h.rows();
  auto a = detail::symmetrized(h);
  std::vector<cplx> v(n * n);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  detail::jacobi_hermitian(a, n, &v);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x].real() > a[y * n + y].real(); });
  HermitianEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a[order[j] * n + order[j]].real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v[i * n + order[j]];
  }
  return out;
}

/// Eigenvalues only, descending.
inline std::vector<double> eigvalsh(const Matrix& h) {
  detail::validate_hermitian(h, "eigvalsh");
  const std::size_t n = h.rows();
  auto a = detail::symmetrized(h);
  detail::jacobi_hermitian(a, n, nullptr);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a[i * n + i].real();
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

/// k-th largest eigenvalue of H(e^{i theta} A), 1-based k. Eigenvalue-only
/// path: Householder tridiagonalisation, then Sturm bisection.
inline double rotated_hermitian_eigenvalue(const Matrix& a, std::size_t k, double theta) {
  require_square(a, "rotated_hermitian_eigenvalue");
  if (k < 1 || k > a.rows()) throw RankTooLarge("rank k must satisfy 1 <= k <= n");
  const std::size_t n = a.rows();
  const cplx w = std::polar(1.0, theta);
  std::vector<cplx> h(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i * n + i] = (w * a(i, i)).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = 0.5 * (w * a(i, j) + std::conj(w * a(j, i)));
      h[i * n + j] = v;
      h[j * n + i] = std::conj(v);
    }
  }
  if (n == 1) return h[0].real();
  std::vector<double> d, e;
  detail::hermitian_tridiagonal(h, n, d, e);
  return detail::tridiagonal_kth_largest(d, e, k);
}

/**
 * Singular values, descending, via the Hermitian embedding [[0, A], [A*, 0]]
 * whose spectrum is {+-sigma_j} padded with zeros.
 */
inline std::vector<double> singular_values(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t p = a.cols();
  const std::size_t r = std::min(m, p);
  if (r == 0) return {};
  Matrix emb(m + p, m + p);
  emb.set_block(0, m, a);
  emb.set_block(m, 0, a.adjoint());
  auto ev = eigvalsh(emb);
  std::vector<double> sv(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(r));
  for (auto& s : sv) s = std::max(s, 0.0);
  return sv;
}

inline double smallest_singular_value(const Matrix& a) {
  auto sv = singular_values(a);
  return sv.empty() ? 0.0 : sv.back();
}

/// max|X*X - I_k|.
inline double isometry_defect(const Matrix& x) {
  return max_abs_diff(x.adjoint() * x, Matrix::identity(x.cols()));
}

/// Nearest isometry X (X*X)^{-1/2}. Requires full column rank.
inline Matrix polar_isometry(const Matrix& x) {
  const Matrix g = x.adjoint() * x;
  const auto eg = eigh(g);
  const std::size_t k = g.rows();
  if (eg.values.back() <= 1e-300) throw InvalidArgument("polar_isometry: rank-deficient input");
  Matrix inv_sqrt(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      cplx s = 0.0;
      for (std::size_t l = 0; l < k; ++l)
        s += eg.vectors(i, l) * (1.0 / std::sqrt(eg.values[l])) * std::conj(eg.vectors(j, l));
      inv_sqrt(i, j) = s;
    }
  return x * inv_sqrt;
}

/// Solves the real symmetric positive-definite system G y = b in place (Cholesky).
/// Returns false when G is not numerically positive definite.
inline bool cholesky_solve(std::vector<double> g, std::size_t n, std::span<double> b) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = g[j * n + j];
    for (std::size_t l = 0; l < j; ++l) d -= g[j * n + l] * g[j * n + l];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    g[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = g[i * n + j];
      for (std::size_t l = 0; l < j; ++l) s -= g[i * n + l] * g[j * n + l];
      g[i * n + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t l = 0; l < i; ++l) s -= g[i * n + l] * b[l];
    b[i] = s / g[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t l = i + 1; l < n; ++l) s -= g[l * n + i] * b[l];
    b[i] = s / g[i * n + i];
  }
  return true;
}

}  // namespace hrnr
