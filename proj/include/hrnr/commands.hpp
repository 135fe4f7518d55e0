#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "hrnr/fixtures.hpp"
#include "hrnr/io.hpp"
#include "hrnr/matrix_poly.hpp"
#include "hrnr/perron.hpp"
#include "hrnr/rank_range.hpp"
#include "hrnr/structure.hpp"

namespace hrnr::cli {

using json = nlohmann::ordered_json;

enum class Format { json, csv, svg };

struct Options {
  std::string input;
  std::size_t k = 1;
  std::size_t samples = kDefaultSamples;
  std::size_t grid = 100;           // lattice steps across the bounding radius
  std::size_t poly_samples = 360;   // directions per lattice point
  double tolerance = 1e-6;
  Format format = Format::json;
  bool timings = false;
};

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "svg") return Format::svg;
  throw ParseError("unknown format '" + s + "' (expected json, csv or svg)", 0);
}

struct NamedMatrix {
  std::string name;
  Matrix a;
};

struct NamedPolynomial {
  std::string name;
  MatrixPolynomial l;
};

/// Fixture name, else a MatrixFile path.
inline NamedMatrix load_matrix(const std::string& input) {
  if (auto a = fixtures::matrix(input)) return {input, *a};
  return {input, io::parse_matrix(io::read_file(input))};
}

/// Polynomial fixture, matrix fixture (as I lambda - A), PolyFile or MatrixFile.
inline NamedPolynomial load_polynomial(const std::string& input) {
  if (auto l = fixtures::polynomial(input)) return {input, *l};
  const std::string text = io::read_file(input);
  std::istringstream probe(text);
  std::string line;
  while (std::getline(probe, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() == 2) return {input, MatrixPolynomial::linear(io::parse_matrix(text))};
    break;
  }
  return {input, io::parse_polynomial(text)};
}

namespace detail {

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json point(cplx z) { return json::array({z.real(), z.imag()}); }

inline json points(const std::vector<cplx>& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back(point(z));
  return a;
}

inline json maximal_set_json(const MaximalSet& s) {
  json j;
  j["kind"] = maximal_kind(s);
  j["radius"] = maximal_radius(s);
  if (const auto* f = std::get_if<FiniteSet>(&s)) {
    j["count"] = f->count;
    j["base_angle"] = f->base_angle;
    j["nearest_base"] = f->nearest_base;
    j["base_gap"] = f->base_gap;
    j["points"] = points(f->points);
  } else if (const auto* g = std::get_if<GenericSet>(&s)) {
    j["count"] = g->points.size();
    j["points"] = points(g->points);
    j["diagnostics"] = g->diagnostics;
  }
  return j;
}

/// Eigenvalues sorted by argument, then modulus.
inline std::vector<cplx> eigenvalues(const Matrix& a) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  if (es.info() != Eigen::Success) throw NoConvergence("eigenvalue computation for plot markers failed");
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
    const double ax = geometry::wrap_angle(std::arg(x)), ay = geometry::wrap_angle(std::arg(y));
    return ax != ay ? ax < ay : std::abs(x) < std::abs(y);
  });
  return ev;
}

// Structure summary of the nonzero pattern (any complex matrix).
inline json structure_json(const Matrix& a) {
  json s;
  const bool irr = is_irreducible(a);
  s["irreducible"] = irr;
  if (irr) {
    const auto cs = cyclic_normal_form(a);
    s["q"] = cs.q;
    s["block_sizes"] = cs.block_sizes;
    s["levels"] = cs.levels;
    s["block_shift"] = cs.block_shift;
  } else {
    s["q"] = nullptr;
    s["block_sizes"] = json::array();
    s["levels"] = json::array();
    s["block_shift"] = false;
  }
  const auto bs = is_block_shift(a);
  s["block_shift_pattern"] = bs.block_shift;
  s["hermitian_pattern_connected"] = hermitian_pattern_irreducible(a);
  s["nonnegative"] = a.is_nonnegative();
  if (a.is_nonnegative() && hermitian_pattern_irreducible(a)) {
    const auto ps = phase_similarity_index(a);
    s["phase_similarity_q"] = ps.q ? json(*ps.q) : json("unbounded");
  } else {
    s["phase_similarity_q"] = nullptr;
  }
  return s;
}

inline std::optional<std::size_t> pattern_index(const Matrix& a) {
  if (!is_irreducible(a)) return std::nullopt;
  return imprimitivity_index(a);
}

struct SvgCanvas {
  double lo_x, hi_x, lo_y, hi_y;
  double size = 600.0;

  SvgCanvas(const std::vector<cplx>& pts) {
    lo_x = lo_y = std::numeric_limits<double>::infinity();
    hi_x = hi_y = -std::numeric_limits<double>::infinity();
    for (const auto& z : pts) {
      lo_x = std::min(lo_x, z.real());
      hi_x = std::max(hi_x, z.real());
      lo_y = std::min(lo_y, z.imag());
      hi_y = std::max(hi_y, z.imag());
    }
    if (pts.empty()) lo_x = lo_y = -1.0, hi_x = hi_y = 1.0;
    lo_x = std::min(lo_x, 0.0), lo_y = std::min(lo_y, 0.0);
    hi_x = std::max(hi_x, 0.0), hi_y = std::max(hi_y, 0.0);
    double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
    const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    span *= 1.1;  // 5% margin each side
    lo_x = cx - span / 2, hi_x = cx + span / 2;
    lo_y = cy - span / 2, hi_y = cy + span / 2;
  }

  [[nodiscard]] double x(double re) const { return (re - lo_x) / (hi_x - lo_x) * size; }
  [[nodiscard]] double y(double im) const { return (hi_y - im) / (hi_y - lo_y) * size; }

  [[nodiscard]] static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
  }

  [[nodiscard]] std::string header() const {
    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(size) + "\" height=\"" + num(size) +
         "\" viewBox=\"0 0 " + num(size) + " " + num(size) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<line class=\"axis\" x1=\"0\" y1=\"" + num(y(0)) + "\" x2=\"" + num(size) + "\" y2=\"" + num(y(0)) +
         "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
    s += "<line class=\"axis\" x1=\"" + num(x(0)) + "\" y1=\"0\" x2=\"" + num(x(0)) + "\" y2=\"" + num(size) +
         "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
    return s;
  }

  [[nodiscard]] std::string polyline(const std::vector<cplx>& poly, const std::string& cls, const char* color) const {
    std::string pts;
    for (std::size_t i = 0; i <= poly.size() && !poly.empty(); ++i) {
      const cplx z = poly[i % poly.size()];
      if (!pts.empty()) pts += ' ';
      pts += num(x(z.real())) + "," + num(y(z.imag()));
    }
    return "<polyline class=\"" + cls + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
  }

  [[nodiscard]] std::string plus(cplx z) const {
    const double px = x(z.real()), py = y(z.imag());
    return "<path class=\"eig\" stroke=\"black\" stroke-width=\"1.5\" d=\"M" + num(px - 5) + " " + num(py) + " h10 M" +
           num(px) + " " + num(py - 5) + " v10\"/>\n";
  }
};

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};
  return colors[i % 7];
}

inline std::string csv_number(double v) { return std::isfinite(v) ? io::format_double(v) : std::string{}; }

}  // namespace detail

/// Irreducibility, index, cyclic blocks, block-shift flags.
inline std::string cmd_structure(const Options& opt) {
  const auto in = load_matrix(opt.input);
  require_square(in.a, "structure");
  json j;
  j["command"] = "structure";
  j["input"] = in.name;
  j["digest"] = io::hex64(io::digest(in.a));
  j["n"] = in.a.rows();
  j["structure"] = detail::structure_json(in.a);
  return j.dump(2) + "\n";
}

/// Boundaries of Lambda_1 .. Lambda_k with radius, maximal set and checks.
inline std::string cmd_range(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const auto in = load_matrix(opt.input);
  const Matrix& a = in.a;
  require_square(a, "range");
  if (opt.k < 1 || opt.k > a.rows()) throw RankTooLarge("range: --k must satisfy 1 <= k <= n");
  if (opt.samples < 16) throw InvalidArgument("range: --samples must be at least 16");

  std::vector<SupportProfile> profiles;
  std::vector<ConvexRegion> regions;
  for (std::size_t k = 1; k <= opt.k; ++k) {
    profiles.push_back(support_profile(a, k, opt.samples));
    regions.push_back(region_from_profile(profiles.back()));
  }

  if (opt.format == Format::csv) {
    std::string out = "kind,k,index,theta,support,re,im\n";
    for (std::size_t r = 0; r < profiles.size(); ++r) {
      const auto& p = profiles[r];
      for (std::size_t i = 0; i < p.size(); ++i)
        out += "support," + std::to_string(r + 1) + "," + std::to_string(i) + "," + io::format_double(p.angles[i]) +
               "," + io::format_double(p.values[i]) + ",,\n";
      for (std::size_t i = 0; i < regions[r].vertices.size(); ++i) {
        const cplx z = regions[r].vertices[i];
        out += "vertex," + std::to_string(r + 1) + "," + std::to_string(i) + ",,," + io::format_double(z.real()) + "," +
               io::format_double(z.imag()) + "\n";
      }
    }
    return out;
  }

  if (opt.format == Format::svg) {
    const auto ev = detail::eigenvalues(a);
    std::vector<cplx> all = ev;
    for (const auto& r : regions) all.insert(all.end(), r.vertices.begin(), r.vertices.end());
    const detail::SvgCanvas canvas(all);
    std::string s = canvas.header();
    for (std::size_t r = 0; r < regions.size(); ++r)
      s += canvas.polyline(regions[r].vertices, "rank-" + std::to_string(r + 1), detail::palette(r));
    for (const auto& z : ev) s += canvas.plus(z);
    s += "</svg>\n";
    return s;
  }

  json j;
  j["command"] = "range";
  j["input"] = in.name;
  j["digest"] = io::hex64(io::digest(a));
  j["n"] = a.rows();
  j["samples"] = opt.samples;
  j["tolerance"] = opt.tolerance;
  j["structure"] = detail::structure_json(a);
  const auto q = detail::pattern_index(a);
  json ranks = json::array();
  for (std::size_t k = 1; k <= opt.k; ++k) {
    const auto& reg = regions[k - 1];
    json rk;
    rk["k"] = k;
    rk["empty"] = reg.empty;
    if (reg.empty) {
      rk["radius"] = nullptr;
      ranks.push_back(rk);
      continue;
    }
    MaximaOptions mo;
    mo.samples = opt.samples;
    const auto ms = maximal_elements(a, k, mo);
    const double r = maximal_radius(ms);
    rk["radius"] = r;
    rk["contains_radius"] = contains(profiles[k - 1], cplx{r, 0.0}, opt.tolerance);
    rk["maximal_set"] = detail::maximal_set_json(ms);
    if (r > 0.0)
      rk["attainment_angle"] = attainment_angle(a, k, opt.samples);
    else
      rk["attainment_angle"] = nullptr;
    rk["circular_disc"] = profiles[k - 1].max_value() - profiles[k - 1].min_value() <= opt.tolerance;
    if (q && *q > 1) {
      const double dev = rotational_deviation(a, k, *q, opt.samples);
      rk["rotational_invariance"] = {{"q", *q}, {"max_deviation", dev}, {"passes", dev <= opt.tolerance}};
    }
    rk["vertices"] = detail::points(reg.vertices);
    ranks.push_back(rk);
  }
  j["ranks"] = ranks;
  j["eigenvalues"] = detail::points(detail::eigenvalues(a));
  if (opt.timings)
    j["timings"] = {{"total_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()}};
  return j.dump(2) + "\n";
}

/// Lattice scan of Lambda_k(L) with radius, maximal set and the companion containment check.
inline std::string cmd_polyrange(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const auto in = load_polynomial(opt.input);
  const auto& l = in.l;
  if (opt.k < 1 || opt.k > l.n) throw RankTooLarge("polyrange: --k must satisfy 1 <= k <= n");
  if (opt.grid == 0) throw InvalidArgument("polyrange: --grid must be positive");

  PolyScanOptions so;
  so.delta = bounding_radius(l) / static_cast<double>(opt.grid);
  so.samples = opt.poly_samples;
  const auto pr = region_scan(l, opt.k, so);
  const Matrix c = companion(l);

  if (opt.format == Format::csv) {
    std::string out = "index,re,im,inside,strict\n";
    for (std::size_t i = 0; i < pr.points.size(); ++i)
      out += std::to_string(i) + "," + io::format_double(pr.points[i].real()) + "," +
             io::format_double(pr.points[i].imag()) + "," + (pr.inside[i] ? "1" : "0") + "," +
             (pr.strict[i] ? "1" : "0") + "\n";
    return out;
  }

  const auto creg = region(c, opt.k);
  if (opt.format == Format::svg) {
    const auto ev = detail::eigenvalues(c);
    std::vector<cplx> all = ev;
    all.insert(all.end(), creg.vertices.begin(), creg.vertices.end());
    const detail::SvgCanvas canvas(all);
    std::string s = canvas.header();
    const double cell = pr.delta / (canvas.hi_x - canvas.lo_x) * canvas.size;
    for (std::size_t i = 0; i < pr.points.size(); ++i)
      if (pr.inside[i])
        s += "<rect class=\"inside\" x=\"" + detail::SvgCanvas::num(canvas.x(pr.points[i].real()) - cell / 2) +
             "\" y=\"" + detail::SvgCanvas::num(canvas.y(pr.points[i].imag()) - cell / 2) + "\" width=\"" +
             detail::SvgCanvas::num(cell) + "\" height=\"" + detail::SvgCanvas::num(cell) + "\" fill=\"#1f77b4\"/>\n";
    s += canvas.polyline(creg.vertices, "companion-rank-" + std::to_string(opt.k), "#d62728");
    for (const auto& z : ev) s += canvas.plus(z);
    s += "</svg>\n";
    return s;
  }

  json j;
  j["command"] = "polyrange";
  j["input"] = in.name;
  j["digest"] = io::hex64(io::digest(l));
  j["n"] = l.n;
  j["m"] = l.m;
  j["k"] = opt.k;
  j["perron"] = l.is_perron();
  const bool c_irr = is_irreducible(c);
  j["companion"] = {{"irreducible", c_irr}, {"q", c_irr ? json(imprimitivity_index(c)) : json(nullptr)}};
  j["delta"] = pr.delta;
  j["bounding_radius"] = pr.bounding_radius;
  j["samples_per_point"] = opt.poly_samples;
  j["lattice_points"] = pr.points.size();
  j["inside_count"] = pr.inside_count();
  j["strict_count"] = static_cast<std::size_t>(std::count(pr.strict.begin(), pr.strict.end(), true));

  // Inside cells must meet the companion range.
  std::size_t violations = 0;
  const double slack = pr.delta / std::sqrt(2.0) + 1e-9 * (1.0 + pr.bounding_radius);
  for (const auto& z : pr.inside_points())
    if (creg.empty || geometry::distance_to_polygon(creg.vertices, z) > slack) ++violations;
  j["containment"] = {{"checked", pr.inside_count()}, {"violations", violations}, {"holds", violations == 0}};

  const double r = radius_poly(l, pr, so.samples);
  j["radius"] = detail::number_or_null(r);
  if (l.is_perron() && c_irr && std::isfinite(r) && r > 0.0) {
    j["maximal_set"] = detail::maximal_set_json(maximal_elements_poly(l, pr, so.samples));
  } else {
    j["maximal_set"] = nullptr;
  }
  if (opt.timings)
    j["timings"] = {{"total_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()}};
  return j.dump(2) + "\n";
}

struct VerifyResult {
  std::string report;
  bool passed = true;
};

/// Runs the invariant suite on a fixture or MatrixFile.
inline VerifyResult cmd_verify(const Options& opt) {
  const auto in = load_matrix(opt.input);
  const Matrix& a = in.a;
  require_square(a, "verify");
  const std::size_t n = a.rows();
  const std::size_t m = opt.samples;
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool ok, double value) {
    checks.push_back({{"check", name}, {"passed", ok}, {"value", detail::number_or_null(value)}});
    all = all && ok;
  };

  std::vector<ConvexRegion> regions;
  for (std::size_t k = 1; k <= std::min(opt.k, n); ++k) regions.push_back(region(a, k, m));

  for (std::size_t k = 2; k <= regions.size(); ++k) {
    if (regions[k - 1].empty) continue;
    double worst = 0.0;
    for (const auto& z : regions[k - 1].vertices)
      worst = std::max(worst, geometry::distance_to_polygon(regions[k - 2].vertices, z));
    record("nesting k=" + std::to_string(k), worst <= 1e-8 * (1.0 + a.max_abs()), worst);
  }

  // Unitary invariance under a seeded random unitary.
  {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> g;
    Matrix x(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) x(i, j) = cplx{g(rng), g(rng)};
    const Matrix u = polar_isometry(x);
    const Matrix b = u.adjoint() * a * u;
    for (std::size_t k = 1; k <= regions.size(); ++k) {
      const auto pa = support_profile(a, k, m);
      const auto pb = support_profile(b, k, m);
      double dev = 0.0;
      for (std::size_t i = 0; i < m; ++i) dev = std::max(dev, std::abs(pa.values[i] - pb.values[i]));
      record("unitary invariance k=" + std::to_string(k), dev <= opt.tolerance, dev);
    }
  }

  const auto q = detail::pattern_index(a);
  if (q && *q > 1)
    for (std::size_t k = 1; k <= regions.size(); ++k) {
      const double dev = rotational_deviation(a, k, *q, m);
      record("rotational invariance q=" + std::to_string(*q) + " k=" + std::to_string(k), dev <= opt.tolerance, dev);
    }

  if (a.is_real(hermitian_tolerance(a)))
    for (std::size_t k = 1; k <= regions.size(); ++k) {
      const auto rep = check_axis_symmetries(a, k, m, opt.tolerance);
      record("real axis symmetry k=" + std::to_string(k), rep.real_axis, rep.real_axis_deviation);
    }

  if (a.is_nonnegative() && is_irreducible(a)) {
    const auto pd = perron(a);
    const double r1 = radius(a, 1, m);
    record("rho <= r_1", pd.rho <= r1 + 1e-8, r1 - pd.rho);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j).real();
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    record("row sum bounds on rho", lo - 1e-9 <= pd.rho && pd.rho <= hi + 1e-9, pd.rho);
    record("spectral index equals period", pd.q_spectral == imprimitivity_index(a), static_cast<double>(pd.q_spectral));
    const auto ms = issos_maximal_set(a, m);
    const auto* f = std::get_if<FiniteSet>(&ms);
    record("maximal set of F(A) has q points", f != nullptr && f->count == pd.q_spectral,
           static_cast<double>(maximal_points(ms).size()));
  }

  json j;
  j["command"] = "verify";
  j["input"] = in.name;
  j["digest"] = io::hex64(io::digest(a));
  j["checks"] = checks;
  j["passed"] = all;
  return {j.dump(2) + "\n", all};
}

}  // namespace hrnr::cli
