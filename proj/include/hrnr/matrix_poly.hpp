#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "hrnr/error.hpp"
#include "hrnr/geometry.hpp"
#include "hrnr/linalg.hpp"
#include "hrnr/matrix.hpp"
#include "hrnr/parallel.hpp"
#include "hrnr/rank_range.hpp"
#include "hrnr/structure.hpp"

namespace hrnr {

/// Monic L(lambda) = I lambda^m - A_{m-1} lambda^{m-1} - ... - A_0.
struct MatrixPolynomial {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Matrix> coeffs;  // A_0 .. A_{m-1}

  MatrixPolynomial() = default;
  explicit MatrixPolynomial(std::vector<Matrix> a) : coeffs(std::move(a)) {
    if (coeffs.empty()) throw InvalidArgument("MatrixPolynomial: degree must be at least 1");
    n = coeffs.front().rows();
    m = coeffs.size();
    for (const auto& c : coeffs)
      if (c.rows() != n || c.cols() != n) throw InvalidArgument("MatrixPolynomial: coefficients must all be n x n");
  }

  /// I lambda - A.
  static MatrixPolynomial linear(const Matrix& a) {
    require_square(a, "MatrixPolynomial::linear");
    return MatrixPolynomial({a});
  }

  [[nodiscard]] bool is_perron(double tol = 0.0) const {
    return std::all_of(coeffs.begin(), coeffs.end(), [tol](const Matrix& c) { return c.is_nonnegative(tol); });
  }

  [[nodiscard]] double max_coefficient_norm() const {
    double r = 0.0;
    for (const auto& c : coeffs) r = std::max(r, c.frobenius_norm());
    return r;
  }

  /// 1e-8 (1 + max_j ||A_j||_F).
  [[nodiscard]] double membership_tolerance() const { return 1e-8 * (1.0 + max_coefficient_norm()); }
};

/// Horner: P = I; P = P lambda - A_j for j = m-1 .. 0.
inline Matrix evaluate(const MatrixPolynomial& l, cplx lambda) {
  Matrix p = Matrix::identity(l.n);
  for (std::size_t j = l.m; j-- > 0;) {
    p *= lambda;
    p -= l.coeffs[j];
  }
  return p;
}

/// Block companion: identity blocks on the superdiagonal, bottom block row
/// (A_0, ..., A_{m-1}). For m = 1 this is A_0.
inline Matrix companion(const MatrixPolynomial& l) {
  const std::size_t n = l.n;
  const std::size_t m = l.m;
  Matrix c(n * m, n * m);
  for (std::size_t b = 0; b + 1 < m; ++b) c.set_block(b * n, (b + 1) * n, Matrix::identity(n));
  for (std::size_t j = 0; j < m; ++j) c.set_block((m - 1) * n, j * n, l.coeffs[j]);
  return c;
}

namespace detail {

// Sample order visiting well-spread directions first so that points far
// outside fail after a handful of eigenvalue evaluations.
inline std::vector<std::size_t> spread_order(std::size_t m) {
  std::vector<std::size_t> order;
  order.reserve(m);
  std::vector<bool> used(m, false);
  for (std::size_t stride = m; stride >= 1; stride /= 2) {
    for (std::size_t i = 0; i < m; i += stride)
      if (!used[i]) {
        used[i] = true;
        order.push_back(i);
      }
    if (stride == 1) break;
  }
  return order;
}

// |dL/dlambda| bound on the disc of radius `radius`.
inline double derivative_bound(const MatrixPolynomial& l, double radius) {
  double d = static_cast<double>(l.m) * std::pow(radius, static_cast<double>(l.m) - 1.0);
  for (std::size_t j = 1; j < l.m; ++j)
    d += static_cast<double>(j) * l.coeffs[j].frobenius_norm() * std::pow(radius, static_cast<double>(j) - 1.0);
  return d;
}

}  // namespace detail

/**
 * min over sampled theta of lambda_k(H(e^{i theta} L(lambda))). Stops as
 * soon as the running minimum drops below `stop_below`.
 */
inline double poly_margin(const MatrixPolynomial& l, std::size_t k, cplx lambda, std::size_t m_theta,
                          double stop_below = -std::numeric_limits<double>::infinity()) {
  if (k < 1 || k > l.n) throw RankTooLarge("poly_margin: rank k must satisfy 1 <= k <= n");
  const Matrix p = evaluate(l, lambda);
  double best = std::numeric_limits<double>::infinity();
  for (auto i : detail::spread_order(m_theta)) {
    const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(m_theta);
    best = std::min(best, support_value(p, k, th));
    if (best < stop_below) break;
  }
  return best;
}

/// 0 in Lambda_k(L(lambda)) up to eps_mem (outer test).
inline bool contains_poly(const MatrixPolynomial& l, std::size_t k, cplx lambda, std::size_t m_theta = 360,
                          std::optional<double> eps_mem = std::nullopt) {
  const double eps = eps_mem.value_or(l.membership_tolerance());
  return poly_margin(l, k, lambda, m_theta, -eps) >= -eps;
}

struct PolyScanOptions {
  double delta = 0.0;  // 0: bounding_radius / 100
  std::size_t samples = 360;
};

/**
 * Lattice scan of Lambda_k(L). A lattice point is `inside` when its cell
 * can meet the set: the margin exceeds -(eps_mem + Lip * delta/sqrt 2),
 * Lip bounding |L'| near the point, and the point lies within delta/sqrt 2
 * of the companion range Lambda_k(C_L). `strict` marks points passing the
 * plain eps_mem test.
 */
struct PolyRegion {
  std::size_t k = 1;
  double delta = 0.0;
  double bounding_radius = 0.0;
  double eps_mem = 0.0;
  std::vector<cplx> points;  // lattice points inside the bounding disc
  std::vector<double> margin;
  std::vector<bool> inside;
  std::vector<bool> strict;

  [[nodiscard]] std::vector<cplx> inside_points() const {
    std::vector<cplx> out;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (inside[i]) out.push_back(points[i]);
    return out;
  }

  [[nodiscard]] std::size_t inside_count() const {
    return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), true));
  }
};

inline double bounding_radius(const MatrixPolynomial& l) {
  const auto reg = region(companion(l), 1);
  const double r = reg.empty ? 0.0 : reg.max_modulus();
  return r > 0.0 ? 1.05 * r : 1.0;
}

inline PolyRegion region_scan(const MatrixPolynomial& l, std::size_t k, const PolyScanOptions& opt = {}) {
  if (k < 1 || k > l.n) throw RankTooLarge("region_scan: rank k must satisfy 1 <= k <= n");
  if (opt.delta < 0.0) throw InvalidArgument("region_scan: delta must be positive");
  PolyRegion pr;
  pr.k = k;
  pr.bounding_radius = bounding_radius(l);
  pr.delta = opt.delta > 0.0 ? opt.delta : pr.bounding_radius / 100.0;
  pr.eps_mem = l.membership_tolerance();

  const auto cl = support_profile(companion(l), k, kDefaultSamples);
  const double half_diag = pr.delta / std::sqrt(2.0);
  const double pre_eps = cl.geometric_tolerance() + half_diag;

  const auto steps = static_cast<long>(std::ceil(pr.bounding_radius / pr.delta));
  for (long iy = -steps; iy <= steps; ++iy)
    for (long ix = -steps; ix <= steps; ++ix) {
      const cplx z{static_cast<double>(ix) * pr.delta, static_cast<double>(iy) * pr.delta};
      if (std::abs(z) <= pr.bounding_radius) pr.points.push_back(z);
    }

  const std::size_t count = pr.points.size();
  pr.margin.assign(count, -std::numeric_limits<double>::infinity());
  std::vector<char> in(count, 0), st(count, 0);
  parallel_for(count, [&](std::size_t i) {
    const cplx z = pr.points[i];
    if (!contains(cl, z, pre_eps)) return;
    const double dilate = pr.eps_mem + half_diag * detail::derivative_bound(l, std::abs(z) + half_diag);
    const double mg = poly_margin(l, k, z, opt.samples, -dilate);
    pr.margin[i] = mg;
    in[i] = mg >= -dilate ? 1 : 0;
    st[i] = mg >= -pr.eps_mem ? 1 : 0;
  });
  pr.inside.assign(in.begin(), in.end());
  pr.strict.assign(st.begin(), st.end());
  return pr;
}

namespace detail {

// Pattern search maximising the margin from z; returns a point passing the
// strict membership test, if one is found within `radius` of z.
inline std::optional<cplx> polish_inside(const MatrixPolynomial& l, std::size_t k, cplx z, double radius,
                                         std::size_t m_theta) {
  const double eps = l.membership_tolerance();
  double best = poly_margin(l, k, z, m_theta);
  if (best >= -eps) return z;
  const cplx start = z;
  double step = radius / 2.0;
  const cplx dirs[8] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {0.7071067811865476, 0.7071067811865476},
                        {-0.7071067811865476, 0.7071067811865476}, {-0.7071067811865476, -0.7071067811865476},
                        {0.7071067811865476, -0.7071067811865476}};
  while (step > 1e-9 * radius) {
    bool moved = false;
    for (const auto& d : dirs) {
      const cplx c = z + step * d;
      if (std::abs(c - start) > radius) continue;
      const double v = poly_margin(l, k, c, m_theta);
      if (v > best) {
        best = v;
        z = c;
        moved = true;
        if (best >= -eps) return z;
      }
    }
    if (!moved) step /= 2.0;
  }
  return std::nullopt;
}

// Largest modulus t >= |p| along the ray through p with t e^{i arg p} strictly
// inside, found by stepping out by `step` then bisecting to `tol`.
inline double ray_boundary(const MatrixPolynomial& l, std::size_t k, cplx p, double step, double tol, double limit,
                           std::size_t m_theta) {
  const double phi = std::arg(p);
  double lo = std::abs(p);
  double hi = lo + step;
  while (hi < limit && contains_poly(l, k, std::polar(hi, phi), m_theta)) {
    lo = hi;
    hi += step;
  }
  if (hi >= limit) {
    if (contains_poly(l, k, std::polar(limit, phi), m_theta)) return limit;
    hi = limit;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (contains_poly(l, k, std::polar(mid, phi), m_theta))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

struct PolyCandidate {
  cplx point;
  double radius;
};

// Polished and ray-refined extremal points from the top lattice points.
inline std::vector<PolyCandidate> refine_top(const MatrixPolynomial& l, const PolyRegion& pr,
                                             const std::vector<std::size_t>& idx, std::size_t m_theta) {
  std::vector<PolyCandidate> out;
  for (auto i : idx) {
    const auto p = polish_inside(l, pr.k, pr.points[i], pr.delta, m_theta);
    if (!p) continue;
    if (std::abs(*p) == 0.0) {
      out.push_back({*p, 0.0});
      continue;
    }
    const double t = ray_boundary(l, pr.k, *p, pr.delta / 5.0, pr.delta / 100.0, 2.0 * pr.bounding_radius, m_theta);
    out.push_back({std::polar(t, std::arg(*p)), t});
  }
  return out;
}

}  // namespace detail

/**
 * Rank-k radius of L: the largest lattice modulus, refined by polishing the
 * top lattice points into the set and bisecting outward along their rays to
 * delta/100. -infinity when nothing is inside.
 */
inline double radius_poly(const MatrixPolynomial& l, const PolyRegion& pr, std::size_t m_theta) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pr.points.size(); ++i)
    if (pr.inside[i]) idx.push_back(i);
  if (idx.empty()) return -std::numeric_limits<double>::infinity();
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(pr.points[a]) > std::abs(pr.points[b]);
  });
  const double r_lat = std::abs(pr.points[idx.front()]);
  std::vector<std::size_t> top;
  for (auto i : idx)
    if (std::abs(pr.points[i]) >= r_lat - pr.delta && top.size() < 16) top.push_back(i);
  const auto cands = detail::refine_top(l, pr, top, m_theta);
  if (cands.empty()) return r_lat;
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& c : cands) r = std::max(r, c.radius);
  return r;
}

inline double radius_poly(const MatrixPolynomial& l, std::size_t k, const PolyScanOptions& opt = {}) {
  return radius_poly(l, region_scan(l, k, opt), opt.samples);
}

/**
 * Maximal elements of Lambda_k(L) for a Perron polynomial with irreducible
 * companion of index q. Expected shape: q equispaced points with base angle
 * 0 or pi/q; anything else is returned as Generic with a diagnostic.
 */
inline MaximalSet maximal_elements_poly(const MatrixPolynomial& l, const PolyRegion& pr, std::size_t m_theta) {
  const std::size_t k = pr.k;
  if (!l.is_perron()) throw NotPerron("maximal_elements_poly: coefficients must be entrywise nonnegative");
  const Matrix c = companion(l);
  if (!is_irreducible(c)) throw NotIrreducible("maximal_elements_poly: companion matrix is reducible");
  const std::size_t q = imprimitivity_index(c);

  std::vector<std::size_t> idx;
  double r_lat = -1.0;
  for (std::size_t i = 0; i < pr.points.size(); ++i)
    if (pr.inside[i]) {
      idx.push_back(i);
      r_lat = std::max(r_lat, std::abs(pr.points[i]));
    }
  if (idx.empty()) throw EmptyRegion("maximal_elements_poly: no lattice point inside Lambda_k(L)");
  if (r_lat <= 0.0) return GenericSet{0.0, {0.0}, "zero radius"};

  std::vector<std::size_t> cand;
  std::vector<double> ang;
  for (auto i : idx)
    if (std::abs(pr.points[i]) >= r_lat - 2.0 * pr.delta) {
      cand.push_back(i);
      ang.push_back(geometry::wrap_angle(std::arg(pr.points[i])));
    }
  const double gap = 3.0 * pr.delta / r_lat;
  const auto clusters = detail::circular_clusters(ang, gap);

  const double eps_angle = 1e-2;
  std::vector<detail::PolyCandidate> best;
  for (const auto& members : clusters) {
    std::vector<std::size_t> pts;
    for (auto m : members) pts.push_back(cand[m]);
    std::sort(pts.begin(), pts.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(pr.points[a]) > std::abs(pr.points[b]);
    });
    if (pts.size() > 4) pts.resize(4);
    auto refined = detail::refine_top(l, pr, pts, m_theta);
    if (refined.empty()) continue;
    auto top = *std::max_element(refined.begin(), refined.end(),
                                 [](const auto& a, const auto& b) { return a.radius < b.radius; });

    // Golden-section search over the ray angle near the cluster's best point.
    if (top.radius > 0.0) {
      const double w = 2.0 * pr.delta / top.radius;
      auto f = [&](double phi) {
        const cplx start = std::polar(std::max(top.radius - 2.0 * pr.delta, 0.0), phi);
        if (!contains_poly(l, k, start, m_theta)) return -1.0;
        return detail::ray_boundary(l, k, start, pr.delta / 5.0, pr.delta / 100.0, 2.0 * pr.bounding_radius,
                                    m_theta);
      };
      const double g = (std::sqrt(5.0) - 1.0) / 2.0;
      double a = std::arg(top.point) - w;
      double b = std::arg(top.point) + w;
      double x1 = b - g * (b - a), x2 = a + g * (b - a);
      double f1 = f(x1), f2 = f(x2);
      while (b - a > 1e-4 * eps_angle) {
        if (f1 < f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + g * (b - a);
          f2 = f(x2);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - g * (b - a);
          f1 = f(x1);
        }
      }
      const double phi = 0.5 * (a + b);
      const double fr = f(phi);
      if (fr > top.radius) top = {std::polar(fr, phi), fr};
    }
    best.push_back(top);
  }
  if (best.empty()) throw EmptyRegion("maximal_elements_poly: no strictly inside point near the lattice maximum");

  double r = 0.0;
  for (const auto& b : best) r = std::max(r, b.radius);
  if (detail::max_circular_gap(ang) <= gap) return CircleSet{r};

  std::vector<cplx> points;
  for (const auto& b : best)
    if (b.radius >= r - pr.delta / 10.0) points.push_back(b.point);
  std::sort(points.begin(), points.end(), [](cplx x, cplx y) {
    return geometry::wrap_angle(std::arg(x)) < geometry::wrap_angle(std::arg(y));
  });
  return classify_maximal_points(r, std::move(points), q, eps_angle);
}

inline MaximalSet maximal_elements_poly(const MatrixPolynomial& l, std::size_t k, const PolyScanOptions& opt = {}) {
  if (!l.is_perron()) throw NotPerron("maximal_elements_poly: coefficients must be entrywise nonnegative");
  if (!is_irreducible(companion(l))) throw NotIrreducible("maximal_elements_poly: companion matrix is reducible");
  return maximal_elements_poly(l, region_scan(l, k, opt), opt.samples);
}

struct EmbeddingReport {
  double scale = 1.0;  // sum_{j<m} |lambda|^{2j}
  double r1 = 0.0;     // ||Y*Y - I||_max
  double r2 = 0.0;     // ||Y* C_L Y - lambda I||_max
  double r3 = 0.0;     // ||Qh* L(lambda) Qh||_max, Qh = sqrt(scale) Q
  bool spurious_zero = false;
};

inline double embedding_scale(std::size_t m, cplx lambda) {
  double s = 0.0;
  double p = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    s += p;
    p *= std::norm(lambda);
  }
  return s;
}

/**
 * Checks the companion embedding Y = (1, lambda, ..., lambda^{m-1})^T (x) Q.
 * Y is an isometry iff Q*Q = I/s with s = sum_j |lambda|^{2j}, and then
 * Y*(C_L - lambda I)Y = -conj(lambda)^{m-1} Q*L(lambda)Q. At lambda = 0
 * with m > 1 the left side vanishes for every Q, flagged as spurious_zero.
 */
inline EmbeddingReport embedding_check(const MatrixPolynomial& l, cplx lambda, const Matrix& q, double eps_iso = 1e-8) {
  if (q.rows() != l.n || q.cols() == 0 || q.cols() > l.n)
    throw InvalidArgument("embedding_check: Q must be n x k with 1 <= k <= n");
  const std::size_t k = q.cols();
  EmbeddingReport rep;
  rep.scale = embedding_scale(l.m, lambda);
  const Matrix gram = q.adjoint() * q;
  if (max_abs_diff(gram, Matrix::identity(k) * (1.0 / rep.scale)) > eps_iso)
    throw BadIsometryScaling("embedding_check: Q*Q must equal I/s, s = sum_j |lambda|^(2j)");

  Matrix y(l.n * l.m, k);
  cplx pw = 1.0;
  for (std::size_t j = 0; j < l.m; ++j) {
    y.set_block(j * l.n, 0, q * pw);
    pw *= lambda;
  }
  const Matrix id = Matrix::identity(k);
  rep.r1 = max_abs_diff(y.adjoint() * y, id);
  rep.r2 = max_abs_diff(y.adjoint() * companion(l) * y, id * lambda);
  const Matrix qh = q * std::sqrt(rep.scale);
  rep.r3 = (qh.adjoint() * evaluate(l, lambda) * qh).max_abs();
  rep.spurious_zero = lambda == cplx{0.0, 0.0} && l.m > 1;
  return rep;
}

}  // namespace hrnr
