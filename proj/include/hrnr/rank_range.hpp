#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hrnr/error.hpp"
#include "hrnr/geometry.hpp"
#include "hrnr/linalg.hpp"
#include "hrnr/matrix.hpp"
#include "hrnr/parallel.hpp"
#include "hrnr/structure.hpp"

namespace hrnr {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr std::size_t kDefaultSamples = 720;
inline constexpr std::size_t kMaxSamples = 11520;

/// Support samples h_i = lambda_k(H(e^{i theta_i} A)).
///
/// Uniform profiles have angles 2 pi i/m; locally refined profiles append
/// extra angles, so consumers must not assume uniform spacing unless
/// `uniform` is set.
struct SupportProfile {
  std::size_t k = 1;
  std::vector<double> angles;
  std::vector<double> values;
  bool uniform = true;

  [[nodiscard]] std::size_t size() const noexcept { return angles.size(); }

  [[nodiscard]] double max_value() const { return *std::max_element(values.begin(), values.end()); }
  [[nodiscard]] double min_value() const { return *std::min_element(values.begin(), values.end()); }

  /// 1e-9 * (1 + max|h_i|).
  [[nodiscard]] double geometric_tolerance() const {
    double m = 0.0;
    for (double h : values) m = std::max(m, std::abs(h));
    return 1e-9 * (1.0 + m);
  }
};

/// lambda_k(H(e^{i theta} A)), the k-th largest eigenvalue.
inline double support_value(const Matrix& a, std::size_t k, double theta) {
  return rotated_hermitian_eigenvalue(a, k, theta);
}

inline SupportProfile support_profile_at(const Matrix& a, std::size_t k, std::vector<double> angles) {
  require_square(a, "support_profile");
  if (k < 1 || k > a.rows()) throw RankTooLarge("support_profile: rank k must satisfy 1 <= k <= n");
  SupportProfile p;
  p.k = k;
  p.angles = std::move(angles);
  p.values.resize(p.angles.size());
  p.uniform = false;
  parallel_for(p.angles.size(), [&](std::size_t i) { p.values[i] = support_value(a, k, p.angles[i]); });
  return p;
}

inline SupportProfile support_profile(const Matrix& a, std::size_t k, std::size_t m = kDefaultSamples) {
  if (m < 16) throw InvalidArgument("support_profile: at least 16 samples required");
  std::vector<double> angles(m);
  for (std::size_t i = 0; i < m; ++i) angles[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(m);
  auto p = support_profile_at(a, k, std::move(angles));
  p.uniform = true;
  return p;
}

/// Uniform profile at 2m samples, reusing the m existing values.
inline SupportProfile doubled_profile(const Matrix& a, const SupportProfile& p) {
  if (!p.uniform) throw InvalidArgument("doubled_profile: profile is not uniform");
  const std::size_t m = p.size();
  std::vector<double> odd(m);
  for (std::size_t i = 0; i < m; ++i) odd[i] = kTwoPi * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(m));
  const auto extra = support_profile_at(a, p.k, odd);
  SupportProfile d;
  d.k = p.k;
  d.uniform = true;
  d.angles.resize(2 * m);
  d.values.resize(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    d.angles[2 * i] = kTwoPi * static_cast<double>(2 * i) / static_cast<double>(2 * m);
    d.values[2 * i] = p.values[i];
    d.angles[2 * i + 1] = odd[i];
    d.values[2 * i + 1] = extra.values[i];
  }
  return d;
}

/// Outer polygonal approximation of a rank-k numerical range.
struct ConvexRegion {
  bool empty = true;
  std::vector<cplx> vertices;  // counter-clockwise

  [[nodiscard]] bool contains(cplx z, double eps) const { return !empty && geometry::polygon_contains(vertices, z, eps); }

  [[nodiscard]] double max_modulus() const {
    double r = -std::numeric_limits<double>::infinity();
    for (const auto& z : vertices) r = std::max(r, std::abs(z));
    return r;
  }

  [[nodiscard]] double min_modulus() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& z : vertices) r = std::min(r, std::abs(z));
    return r;
  }
};

/**
 * Intersection of the half-planes {z : Re(e^{i theta_i} z) <= h_i}.
 *
 * Each constraint is relaxed by the geometric tolerance so that degenerate
 * ranges (a point, a segment) still yield a polygon; the region is empty
 * when even the relaxed system is infeasible.
 */
inline ConvexRegion region_from_profile(const SupportProfile& p) {
  const double slack = p.geometric_tolerance();
  std::vector<geometry::HalfPlane> planes;
  planes.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) planes.push_back(geometry::rotated_half_plane(p.angles[i], p.values[i] + slack));
  ConvexRegion r;
  if (auto poly = geometry::intersect_half_planes(std::move(planes), slack)) {
    r.empty = false;
    r.vertices = std::move(*poly);
  }
  return r;
}

inline ConvexRegion region(const Matrix& a, std::size_t k, std::size_t m = kDefaultSamples) {
  return region_from_profile(support_profile(a, k, m));
}

/// Re(e^{i theta_i} z) <= h_i + eps for every sample. One-sided: true
/// certifies membership of the outer approximation only.
inline bool contains(const SupportProfile& p, cplx z, double eps) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if ((std::polar(1.0, p.angles[i]) * z).real() > p.values[i] + eps) return false;
  return true;
}

inline bool contains(const Matrix& a, std::size_t k, cplx z, std::size_t m = kDefaultSamples, double eps = 1e-8) {
  return contains(support_profile(a, k, m), z, eps);
}

// ---------------------------------------------------------------------------
// Maximal elements

struct CircleSet {
  double radius = 0.0;
};

/// q points r e^{i(theta_0 + 2 pi t/q)}.
struct FiniteSet {
  double radius = 0.0;
  double base_angle = 0.0;  // raw, in [-pi/(2q), 3 pi/(2q))
  std::size_t count = 0;
  std::vector<cplx> points;
  double nearest_base = 0.0;  // 0 or pi/q, whichever is closer
  double base_gap = 0.0;      // |base_angle - nearest_base| on the circle mod 2 pi/q
};

struct GenericSet {
  double radius = 0.0;
  std::vector<cplx> points;
  std::string diagnostics;
};

using MaximalSet = std::variant<CircleSet, FiniteSet, GenericSet>;

inline double maximal_radius(const MaximalSet& s) {
  return std::visit([](const auto& v) { return v.radius; }, s);
}

inline std::vector<cplx> maximal_points(const MaximalSet& s) {
  if (const auto* f = std::get_if<FiniteSet>(&s)) return f->points;
  if (const auto* g = std::get_if<GenericSet>(&s)) return g->points;
  return {};
}

inline const char* maximal_kind(const MaximalSet& s) {
  switch (s.index()) {
    case 0: return "circle";
    case 1: return "finite";
    default: return "generic";
  }
}

struct MaximaOptions {
  std::size_t samples = kDefaultSamples;
  std::optional<double> eps_max;  // default 1e-6 (1 + r_k)
  double eps_angle = 1e-3;
  int zoom_levels = 4;
};

namespace detail {

inline double default_eps_max(double r) { return 1e-6 * (1.0 + r); }

struct MaximaSearch {
  SupportProfile profile;
  ConvexRegion region;
  bool circle_like = false;
  double radius = -std::numeric_limits<double>::infinity();
  std::vector<cplx> points;  // refined maximal points, sorted by angle
};

struct AngularCluster {
  double center = 0.0;      // point angle of the current best vertex
  double half_width = 0.0;  // search window around center
  cplx best = 0.0;
};

// Groups sorted angles into circular runs whose consecutive gaps are <= gap.
inline std::vector<std::vector<std::size_t>> circular_clusters(const std::vector<double>& angles, double gap) {
  std::vector<std::size_t> order(angles.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    if (idx == 0 || angles[order[idx]] - angles[order[idx - 1]] > gap) clusters.emplace_back();
    clusters.back().push_back(order[idx]);
  }
  if (clusters.size() > 1 && angles[order.front()] + kTwoPi - angles[order.back()] <= gap) {
    auto& last = clusters.back();
    last.insert(last.end(), clusters.front().begin(), clusters.front().end());
    clusters.erase(clusters.begin());
  }
  return clusters;
}

inline double max_circular_gap(std::vector<double> angles) {
  if (angles.empty()) return kTwoPi;
  std::sort(angles.begin(), angles.end());
  double g = angles.front() + kTwoPi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) g = std::max(g, angles[i] - angles[i - 1]);
  return g;
}

/**
 * Locates the points of maximum modulus of the outer region.
 *
 * Candidate vertices close to the maximum are grouped by angle; each group
 * is then refined by adding dense support samples around the normal
 * direction -phi of its best vertex and re-intersecting, shrinking the
 * window each round. When the candidates surround the origin the range is
 * treated as circle-like and refined by doubling the uniform sample count.
 */
inline MaximaSearch locate_maxima(const Matrix& a, std::size_t k, const MaximaOptions& opt) {
  MaximaSearch s;
  s.profile = support_profile(a, k, opt.samples);
  s.region = region_from_profile(s.profile);
  if (s.region.empty) return s;

  const double tiny = s.profile.geometric_tolerance();
  const double r0 = s.region.max_modulus();
  if (r0 <= 10.0 * tiny) {
    s.radius = 0.0;
    s.points = {0.0};
    return s;
  }

  const std::size_t m = opt.samples;
  const double step = kTwoPi / static_cast<double>(m);
  const double eps0 = opt.eps_max.value_or(default_eps_max(r0));
  const double tau = eps0 + 4.0 * r0 * (1.0 - std::cos(step));

  std::vector<double> cand_angles;
  std::vector<cplx> cand;
  for (const auto& z : s.region.vertices)
    if (std::abs(z) >= r0 - tau) {
      cand.push_back(z);
      cand_angles.push_back(geometry::wrap_angle(std::arg(z)));
    }

  if (max_circular_gap(cand_angles) <= 3.0 * step) {
    s.circle_like = true;
    double prev = r0;
    while (s.profile.size() < std::max(kMaxSamples, opt.samples)) {
      s.profile = doubled_profile(a, s.profile);
      s.region = region_from_profile(s.profile);
      if (s.region.empty) break;
      const double r = s.region.max_modulus();
      const bool settled = std::abs(r - prev) < 1e-8;
      prev = r;
      if (settled) break;
    }
    s.radius = prev;
    return s;
  }

  std::vector<AngularCluster> clusters;
  for (const auto& members : circular_clusters(cand_angles, 3.0 * step)) {
    AngularCluster c;
    double spread = 0.0;
    std::size_t best = members.front();
    for (auto i : members)
      if (std::abs(cand[i]) > std::abs(cand[best])) best = i;
    c.best = cand[best];
    c.center = cand_angles[best];
    for (auto i : members) spread = std::max(spread, std::abs(geometry::angle_difference(cand_angles[i], c.center)));
    c.half_width = std::max(3.0 * step, spread + step);
    clusters.push_back(c);
  }

  // Accumulated samples: global grid plus every local refinement so far.
  std::vector<double> angles = s.profile.angles;
  std::vector<double> values = s.profile.values;
  constexpr std::size_t kLocalSamples = 48;
  for (int level = 0; level < opt.zoom_levels; ++level) {
    std::vector<double> local;
    for (const auto& c : clusters)
      for (std::size_t j = 0; j <= kLocalSamples; ++j) {
        const double u = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(kLocalSamples);
        local.push_back(geometry::wrap_angle(-c.center + u * c.half_width));
      }
    const auto extra = support_profile_at(a, k, local);
    angles.insert(angles.end(), extra.angles.begin(), extra.angles.end());
    values.insert(values.end(), extra.values.begin(), extra.values.end());

    SupportProfile merged;
    merged.k = k;
    merged.uniform = false;
    merged.angles = angles;
    merged.values = values;
    const auto refined = region_from_profile(merged);
    if (refined.empty) break;
    for (auto& c : clusters) {
      cplx best = c.best;
      bool found = false;
      for (const auto& z : refined.vertices) {
        if (std::abs(geometry::angle_difference(std::arg(z), c.center)) > c.half_width) continue;
        if (!found || std::abs(z) > std::abs(best)) {
          best = z;
          found = true;
        }
      }
      if (found) {
        c.best = best;
        c.center = geometry::wrap_angle(std::arg(best));
      }
      c.half_width /= 6.0;
    }
    s.region = refined;
  }

  double r = 0.0;
  for (const auto& c : clusters) r = std::max(r, std::abs(c.best));
  const double eps = opt.eps_max.value_or(default_eps_max(r));
  for (const auto& c : clusters)
    if (std::abs(c.best) >= r - eps) s.points.push_back(c.best);
  std::sort(s.points.begin(), s.points.end(), [](cplx x, cplx y) {
    return geometry::wrap_angle(std::arg(x)) < geometry::wrap_angle(std::arg(y));
  });
  s.radius = r;
  return s;
}

}  // namespace detail

/// Rank-k numerical radius r_k(A); -infinity when the range is empty.
inline double radius(const Matrix& a, std::size_t k, std::size_t m = kDefaultSamples) {
  MaximaOptions opt;
  opt.samples = m;
  return detail::locate_maxima(a, k, opt).radius;
}

/**
 * Classifies points of equal modulus: equispaced points become a FiniteSet
 * (validated against `expected_q` when given), anything else a GenericSet.
 */
inline MaximalSet classify_maximal_points(double r, std::vector<cplx> points, std::optional<std::size_t> expected_q,
                                          double eps_angle) {
  const std::size_t c = points.size();
  std::vector<double> ang(c);
  for (std::size_t i = 0; i < c; ++i) ang[i] = geometry::wrap_angle(std::arg(points[i]));

  std::string diag;
  bool equispaced = c > 0;
  const double spacing = c > 0 ? kTwoPi / static_cast<double>(c) : 0.0;
  for (std::size_t i = 0; i + 1 < c && equispaced; ++i)
    if (std::abs(geometry::angle_difference(ang[i + 1], ang[i]) - spacing) > eps_angle) equispaced = false;
  if (c > 1 && std::abs(geometry::angle_difference(ang.front() + kTwoPi, ang.back()) - spacing) > eps_angle)
    equispaced = false;
  if (!equispaced) diag = "maximal points are not equispaced";

  FiniteSet f;
  if (equispaced) {
    f.radius = r;
    f.count = c;
    f.points = points;
    // Reduced into [-spacing/4, 3 spacing/4) so both 0 and pi/q are interior.
    f.base_angle = std::fmod(*std::min_element(ang.begin(), ang.end()) + spacing / 4.0, spacing) - spacing / 4.0;
    const double half = spacing / 2.0;
    auto circ = [&](double x, double y) {
      double d = std::fmod(std::abs(x - y), spacing);
      return std::min(d, spacing - d);
    };
    const double gap0 = circ(f.base_angle, 0.0);
    const double gap1 = circ(f.base_angle, half);
    f.nearest_base = gap0 <= gap1 ? 0.0 : half;
    f.base_gap = std::min(gap0, gap1);
  }

  if (expected_q) {
    if (c != *expected_q) {
      diag = "found " + std::to_string(c) + " maximal points, index of imprimitivity is " + std::to_string(*expected_q);
      equispaced = false;
    } else if (equispaced && f.base_gap > eps_angle) {
      diag = "base angle " + std::to_string(f.base_angle) + " is not within tolerance of 0 or pi/q";
      equispaced = false;
    }
  }
  if (equispaced) return f;
  return GenericSet{r, std::move(points), diag};
}

/**
 * Maximal elements F_k(A) = {z in Lambda_k(A) : |z| = r_k(A)}.
 *
 * Circle when the range is an origin-centred disc; Finite when the points
 * are equispaced (for nonnegative irreducible input the count must equal
 * the index of imprimitivity and the base angle must be 0 or pi/q);
 * Generic otherwise, with diagnostics. Throws EmptyRegion.
 */
inline MaximalSet maximal_elements(const Matrix& a, std::size_t k, const MaximaOptions& opt = {}) {
  const auto s = detail::locate_maxima(a, k, opt);
  if (s.region.empty) throw EmptyRegion("maximal_elements: rank-k numerical range is empty");
  if (s.radius == 0.0) return GenericSet{0.0, {0.0}, "zero radius"};
  const double eps = opt.eps_max.value_or(detail::default_eps_max(s.radius));
  if (s.circle_like) {
    if (s.region.min_modulus() >= s.radius - eps) return CircleSet{s.radius};
    return GenericSet{s.radius, {}, "near-circular boundary not centred at the origin"};
  }
  std::optional<std::size_t> q;
  if (a.is_nonnegative() && is_irreducible(a)) q = imprimitivity_index(a);
  return classify_maximal_points(s.radius, s.points, q, opt.eps_angle);
}

inline MaximalSet maximal_elements(const Matrix& a, std::size_t k, std::size_t m, double eps_max) {
  MaximaOptions opt;
  opt.samples = m;
  opt.eps_max = eps_max;
  return maximal_elements(a, k, opt);
}

/**
 * Principal argument of the first maximal element: the smallest theta with
 * r_k e^{i theta} in the range. Points within eps_angle below the positive
 * real axis are reported with their (slightly negative) signed angle.
 */
inline double attainment_angle(const Matrix& a, std::size_t k, std::size_t m = kDefaultSamples,
                               double eps_angle = 1e-3) {
  MaximaOptions opt;
  opt.samples = m;
  const auto s = detail::locate_maxima(a, k, opt);
  if (s.region.empty) throw EmptyRegion("attainment_angle: rank-k numerical range is empty");
  if (s.radius <= 0.0) throw ZeroRadius("attainment_angle: r_k(A) = 0");
  if (s.circle_like) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : s.points) {
    double phi = geometry::wrap_angle(std::arg(z));
    if (phi > kTwoPi - eps_angle) phi -= kTwoPi;
    best = std::min(best, phi);
  }
  return best;
}

/// max over samples and t of |h(theta) - h(theta + 2 pi t/q)|.
inline double rotational_deviation(const Matrix& a, std::size_t k, std::size_t q, std::size_t m = kDefaultSamples) {
  if (q == 0) throw InvalidArgument("rotational_deviation: q must be positive");
  const auto p = support_profile(a, k, m);
  double dev = 0.0;
  for (std::size_t t = 1; t < q; ++t) {
    const double shift = kTwoPi * static_cast<double>(t) / static_cast<double>(q);
    if ((m * t) % q == 0) {
      const std::size_t off = m * t / q;
      for (std::size_t i = 0; i < m; ++i) dev = std::max(dev, std::abs(p.values[i] - p.values[(i + off) % m]));
    } else {
      for (std::size_t i = 0; i < m; ++i)
        dev = std::max(dev, std::abs(p.values[i] - support_value(a, k, p.angles[i] + shift)));
    }
  }
  return dev;
}

inline bool check_rotational_invariance(const Matrix& a, std::size_t k, std::size_t q, std::size_t m, double eps) {
  return rotational_deviation(a, k, q, m) <= eps;
}

struct AxisSymmetryReport {
  bool real_axis = false;
  bool lines_Lpm = false;
  std::size_t q = 1;
  double real_axis_deviation = 0.0;
  double lines_deviation = 0.0;
};

/**
 * Symmetry of the support profile of a real matrix about the real axis,
 * h(theta) = h(-theta), and about the lines through e^{+-i pi/q},
 * h(theta) = h(-theta -+ 2 pi/q). Without an explicit q the diagonal
 * similarity index is used when defined, else q = 1.
 */
inline AxisSymmetryReport check_axis_symmetries(const Matrix& a, std::size_t k, std::size_t m, double eps,
                                                std::optional<std::size_t> q = std::nullopt) {
  if (!a.is_real(hermitian_tolerance(a))) throw InvalidArgument("check_axis_symmetries: matrix must be real");
  AxisSymmetryReport rep;
  if (q) {
    rep.q = *q;
  } else if (a.is_nonnegative() && hermitian_pattern_irreducible(a)) {
    const auto ps = phase_similarity_index(a);
    rep.q = ps.q.value_or(1);
  }
  const auto p = support_profile(a, k, m);
  for (std::size_t i = 0; i < m; ++i)
    rep.real_axis_deviation = std::max(rep.real_axis_deviation, std::abs(p.values[i] - p.values[(m - i) % m]));
  const double phi = kTwoPi / static_cast<double>(rep.q);
  for (std::size_t i = 0; i < m; ++i) {
    const double th = p.angles[i];
    const double plus = support_value(a, k, -th - phi);
    const double minus = support_value(a, k, -th + phi);
    rep.lines_deviation = std::max({rep.lines_deviation, std::abs(p.values[i] - plus), std::abs(p.values[i] - minus)});
  }
  rep.real_axis = rep.real_axis_deviation <= eps;
  rep.lines_Lpm = rep.lines_deviation <= eps;
  return rep;
}

/// Constant support function: max h - min h <= eps. Throws EmptyRegion.
inline bool is_circular_disc(const Matrix& a, std::size_t k, std::size_t m, double eps) {
  const auto p = support_profile(a, k, m);
  if (region_from_profile(p).empty) throw EmptyRegion("is_circular_disc: rank-k numerical range is empty");
  return p.max_value() - p.min_value() <= eps;
}

/**
 * Vertices of Lambda_k(P_n) for 2k < n: the intersections of consecutive
 * k-step chords [z_t, z_{t+k}] and [z_{t+1}, z_{t+k+1}] of the n-th roots of
 * unity. For k = 1 this is z_{t+1}.
 */
inline std::vector<cplx> cyclic_polygon(std::size_t n, std::size_t k) {
  if (k == 0) throw InvalidArgument("cyclic_polygon: k must be positive");
  if (2 * k >= n) throw RankTooLarge("cyclic_polygon: requires 2k < n");
  auto z = [n](std::size_t j) { return std::polar(1.0, kTwoPi * static_cast<double>(j % n) / static_cast<double>(n)); };
  std::vector<cplx> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const cplx a = z(t), b = z(t + k), c = z(t + 1), d = z(t + k + 1);
    // a + s (b - a) = c + u (d - c)
    const cplx e = b - a, f = d - c, g = c - a;
    const double det = geometry::cross(e, f);
    const double s = geometry::cross(g, f) / det;
    out[t] = a + s * e;
  }
  return out;
}

}  // namespace hrnr
