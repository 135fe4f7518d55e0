#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "hrnr/matrix.hpp"

namespace hrnr::geometry {

/// Closed half-plane {z : nx Re z + ny Im z <= offset}, (nx, ny) a unit normal.
struct HalfPlane {
  double nx = 1.0;
  double ny = 0.0;
  double offset = 0.0;

  [[nodiscard]] double excess(cplx z) const { return nx * z.real() + ny * z.imag() - offset; }
  [[nodiscard]] double angle() const { return std::atan2(ny, nx); }
};

/// {z : Re(e^{i theta} z) <= h}.
inline HalfPlane rotated_half_plane(double theta, double h) { return {std::cos(theta), -std::sin(theta), h}; }

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline std::optional<cplx> line_intersection(const HalfPlane& a, const HalfPlane& b) {
  const double det = a.nx * b.ny - a.ny * b.nx;
  if (std::abs(det) < 1e-15) return std::nullopt;
  return cplx{(a.offset * b.ny - a.ny * b.offset) / det, (a.nx * b.offset - a.offset * b.nx) / det};
}

/**
 * Intersection of half-planes whose normals leave no angular gap of pi or
 * more (so the intersection is bounded). Returns the counter-clockwise
 * vertex list, or nullopt when the intersection is empty. Every returned
 * vertex satisfies every constraint to within `tol`.
 */
inline std::optional<std::vector<cplx>> intersect_half_planes(std::vector<HalfPlane> planes, double tol) {
  if (planes.size() < 3) return std::nullopt;
  std::stable_sort(planes.begin(), planes.end(),
                   [](const HalfPlane& a, const HalfPlane& b) { return a.angle() < b.angle(); });

  // Same normal: keep the tighter one.
  std::vector<HalfPlane> lines;
  for (const auto& p : planes) {
    if (!lines.empty() && std::abs(lines.back().angle() - p.angle()) < 1e-14) {
      if (p.offset < lines.back().offset) lines.back() = p;
      continue;
    }
    lines.push_back(p);
  }

  auto outside = [](const HalfPlane& l, const std::optional<cplx>& z) { return !z || l.excess(*z) > 0.0; };

  std::deque<HalfPlane> dq;
  for (const auto& l : lines) {
    while (dq.size() >= 2 && outside(l, line_intersection(dq[dq.size() - 2], dq.back()))) dq.pop_back();
    while (dq.size() >= 2 && outside(l, line_intersection(dq[0], dq[1]))) dq.pop_front();
    dq.push_back(l);
  }
  while (dq.size() >= 3 && outside(dq.front(), line_intersection(dq[dq.size() - 2], dq.back()))) dq.pop_back();
  while (dq.size() >= 3 && outside(dq.back(), line_intersection(dq[0], dq[1]))) dq.pop_front();
  if (dq.size() < 3) return std::nullopt;

  std::vector<cplx> vertices;
  vertices.reserve(dq.size());
  for (std::size_t i = 0; i < dq.size(); ++i) {
    const auto z = line_intersection(dq[i], dq[(i + 1) % dq.size()]);
    if (!z) return std::nullopt;
    vertices.push_back(*z);
  }

  // An infeasible system can leave a self-consistent looking deque behind;
  // only a vertex set that satisfies every constraint certifies nonemptiness.
  for (const auto& z : vertices)
    for (const auto& l : lines)
      if (l.excess(z) > tol) return std::nullopt;

  std::vector<cplx> dedup;
  const double merge = tol * 1e-3;
  for (const auto& z : vertices)
    if (dedup.empty() || std::abs(z - dedup.back()) > merge) dedup.push_back(z);
  while (dedup.size() > 1 && std::abs(dedup.front() - dedup.back()) <= merge) dedup.pop_back();
  return dedup;
}

/// Signed distance-like test: z lies in the CCW convex polygon up to eps.
inline bool polygon_contains(std::span<const cplx> poly, cplx z, double eps) {
  if (poly.empty()) return false;
  if (poly.size() == 1) return std::abs(z - poly[0]) <= eps;
  if (poly.size() == 2) {
    const cplx d = poly[1] - poly[0];
    const double t = std::clamp(std::real((z - poly[0]) * std::conj(d)) / std::norm(d), 0.0, 1.0);
    return std::abs(z - (poly[0] + t * d)) <= eps;
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const cplx a = poly[i];
    const cplx b = poly[(i + 1) % poly.size()];
    const double len = std::abs(b - a);
    if (len == 0.0) continue;
    if (cross(b - a, z - a) / len < -eps) return false;
  }
  return true;
}

inline double point_segment_distance(cplx z, cplx a, cplx b) {
  const cplx d = b - a;
  const double n2 = std::norm(d);
  if (n2 == 0.0) return std::abs(z - a);
  const double t = std::clamp(std::real((z - a) * std::conj(d)) / n2, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

/// Distance from z to the convex polygon (0 inside).
inline double distance_to_polygon(std::span<const cplx> poly, cplx z) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (polygon_contains(poly, z, 0.0)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    d = std::min(d, point_segment_distance(z, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

/// Hausdorff distance between two convex polygons (attained at vertices).
inline double hausdorff_distance(std::span<const cplx> p, std::span<const cplx> q) {
  double d = 0.0;
  for (const auto& z : p) d = std::max(d, distance_to_polygon(q, z));
  for (const auto& z : q) d = std::max(d, distance_to_polygon(p, z));
  return d;
}

/// Convexity and CCW orientation of a closed polygon, up to tol.
inline bool is_convex_ccw(std::span<const cplx> poly, double tol) {
  const std::size_t n = poly.size();
  if (n < 3) return true;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = poly[i];
    const cplx b = poly[(i + 1) % n];
    const cplx c = poly[(i + 2) % n];
    if (cross(b - a, c - b) < -tol) return false;
  }
  return true;
}

/// Convex hull (Andrew's monotone chain), counter-clockwise.
inline std::vector<cplx> convex_hull(std::vector<cplx> pts) {
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  if (pts.size() < 3) return pts;
  std::vector<cplx> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Angle in [0, 2 pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

/// Shortest signed difference a - b on the circle, in (-pi, pi].
inline double angle_difference(double a, double b) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double d = std::fmod(a - b, two_pi);
  if (d > std::numbers::pi) d -= two_pi;
  if (d <= -std::numbers::pi) d += two_pi;
  return d;
}

}  // namespace hrnr::geometry
