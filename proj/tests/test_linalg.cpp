#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <numbers>
#include <random>

#include "hrnr/geometry.hpp"
#include "hrnr/linalg.hpp"
#include "hrnr/parallel.hpp"
#include "test_support.hpp"

using namespace hrnr;
using Catch::Approx;

TEST_CASE("hermitian_part examples", "[linalg]") {
  std::mt19937_64 rng(1);
  const Matrix h = oracle::random_hermitian(rng, 4);
  CHECK(max_abs_diff(hermitian_part(h), h) < 1e-15);

  const Matrix ii = Matrix::identity(3) * cplx{0.0, 1.0};
  CHECK(hermitian_part(ii).max_abs() == 0.0);

  const Matrix a{{0, 2}, {0, 0}};
  CHECK(max_abs_diff(hermitian_part(a), Matrix{{0, 1}, {1, 0}}) == 0.0);

  const Matrix r = oracle::random_complex(rng, 5, 5);
  CHECK(hermitian_defect(hermitian_part(r)) == 0.0);
}

TEST_CASE("eigh on small closed forms", "[linalg]") {
  const auto id = eigh(Matrix::identity(3));
  CHECK(id.values == std::vector<double>{1.0, 1.0, 1.0});

  const auto x = eigh(Matrix{{0, 1}, {1, 0}});
  CHECK(x.values[0] == Approx(1.0).margin(1e-15));
  CHECK(x.values[1] == Approx(-1.0).margin(1e-15));
}

TEST_CASE("eigh matches the characteristic cubic on random 3x3", "[linalg][property]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix h = oracle::random_hermitian(rng, 3);
    const auto expect = oracle::hermitian3_eigenvalues(h);
    const auto got = eigh(h).values;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - expect[i]) <= 1e-10);
  }
}

TEST_CASE("eigh residual, unitarity and ordering", "[linalg][property]") {
  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 12; ++n)
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix h = hermitian_part(oracle::random_complex(rng, n, n));
      const auto eg = eigh(h);
      const double scale = 1e-12 * (1.0 + h.max_abs()) * static_cast<double>(n);
      CHECK(std::is_sorted(eg.values.begin(), eg.values.end(), std::greater<>()));
      Matrix lam(n, n);
      for (std::size_t i = 0; i < n; ++i) lam(i, i) = eg.values[i];
      CHECK(max_abs_diff(h * eg.vectors, eg.vectors * lam) <= scale * 10.0);
      CHECK(isometry_defect(eg.vectors) <= 1e-12 * static_cast<double>(n));
      const auto ev = eigvalsh(h);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ev[i] - eg.values[i]) <= scale);
    }
}

TEST_CASE("eigh rejects non-Hermitian input", "[linalg]") {
  CHECK_THROWS_AS(eigh(Matrix{{0, 1}, {0, 0}}), NotHermitian);
  CHECK_THROWS_AS(eigh(Matrix(2, 3)), InvalidArgument);
  // Within tolerance is accepted.
  CHECK_NOTHROW(eigh(Matrix{{1, cplx{0.5, 1e-13}}, {0.5, 2}}));
}

TEST_CASE("rotated eigenvalue path agrees with Jacobi and an external solver", "[linalg][property]") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  for (std::size_t n = 1; n <= 12; ++n)
    for (int trial = 0; trial < 6; ++trial) {
      const Matrix a = oracle::random_complex(rng, n, n);
      const double th = ang(rng);
      const auto h = hermitian_part(rotate(a, th));
      const auto jac = eigvalsh(h);
      const auto ext = oracle::hermitian_eigenvalues(h);
      for (std::size_t k = 1; k <= n; ++k) {
        const double v = rotated_hermitian_eigenvalue(a, k, th);
        CHECK(std::abs(v - jac[k - 1]) <= 1e-11 * (1.0 + h.max_abs()) * n);
        CHECK(std::abs(v - ext[k - 1]) <= 1e-11 * (1.0 + h.max_abs()) * n);
      }
    }
  // Repeated and zero spectra.
  CHECK(rotated_hermitian_eigenvalue(Matrix::identity(5), 3, 0.0) == Approx(1.0).margin(1e-14));
  CHECK(rotated_hermitian_eigenvalue(Matrix(4, 4), 2, 1.0) == Approx(0.0).margin(1e-300));
  CHECK(rotated_hermitian_eigenvalue(Matrix::identity(4) * 2.0, 4, std::numbers::pi) == Approx(-2.0).margin(1e-14));
  CHECK_THROWS_AS(rotated_hermitian_eigenvalue(Matrix::identity(3), 4, 0.0), RankTooLarge);
  CHECK_THROWS_AS(rotated_hermitian_eigenvalue(Matrix::identity(3), 0, 0.0), RankTooLarge);
}

TEST_CASE("singular values", "[linalg]") {
  const auto d = singular_values(Matrix{{3, 0}, {0, 1}});
  CHECK(d[0] == Approx(3.0).margin(1e-13));
  CHECK(d[1] == Approx(1.0).margin(1e-13));
  for (double s : singular_values(Matrix(3, 4))) CHECK(s == 0.0);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = oracle::random_complex(rng, 3, 2);
    const Matrix g = a.adjoint() * a;
    const auto ev = oracle::hermitian2_eigenvalues(g(0, 0).real(), g(0, 1), g(1, 1).real());
    const auto sv = singular_values(a);
    REQUIRE(sv.size() == 2);
    CHECK(std::abs(sv[0] - std::sqrt(ev[0])) <= 1e-10);
    CHECK(std::abs(sv[1] - std::sqrt(std::max(ev[1], 0.0))) <= 1e-10);
  }
}

TEST_CASE("singular value invariances", "[linalg][property]") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int trial = 0; trial < 40; ++trial) {
    const Matrix a = oracle::random_complex(rng, dim(rng), dim(rng));
    const auto s = singular_values(a);
    const auto sa = singular_values(a.adjoint());
    const auto sr = singular_values(rotate(a, 0.37 * trial));
    REQUIRE(s.size() == sa.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::abs(s[i] - sa[i]) <= 1e-10);
      CHECK(std::abs(s[i] - sr[i]) <= 1e-10);
    }
  }
}

TEST_CASE("top eigenvalue of the Hermitian part bounds the mean of the trace", "[linalg][property]") {
  std::mt19937_64 rng(23);
  for (std::size_t n = 1; n <= 10; ++n) {
    const Matrix a = oracle::random_complex(rng, n, n);
    CHECK(eigvalsh(hermitian_part(a))[0] >= a.trace().real() / static_cast<double>(n) - 1e-12);
  }
}

TEST_CASE("rotate", "[linalg]") {
  std::mt19937_64 rng(29);
  const Matrix a = oracle::random_complex(rng, 4, 4);
  CHECK(max_abs_diff(rotate(a, 0.0), a) == 0.0);
  CHECK(max_abs_diff(rotate(a, 2.0 * std::numbers::pi), a) < 1e-14);
  CHECK(max_abs_diff(rotate(rotate(a, 0.8), -0.8), a) < 1e-14);
}

TEST_CASE("polar isometry and Cholesky solve", "[linalg]") {
  std::mt19937_64 rng(31);
  const Matrix x = oracle::random_complex(rng, 6, 3);
  const Matrix q = polar_isometry(x);
  CHECK(isometry_defect(q) < 1e-13);
  CHECK_THROWS_AS(polar_isometry(Matrix(3, 2)), InvalidArgument);

  std::vector<double> g{4, 2, 2, 3};
  std::vector<double> b{2, 1};
  REQUIRE(cholesky_solve(g, 2, b));
  CHECK(b[0] == Approx(0.5));
  CHECK(b[1] == Approx(0.0).margin(1e-15));
  std::vector<double> bad{1, 2, 2, 1};
  std::vector<double> rhs{1, 1};
  CHECK_FALSE(cholesky_solve(bad, 2, rhs));
}

TEST_CASE("parallel_for visits every index once and rethrows", "[parallel]") {
  for (std::size_t count : {0u, 1u, 63u, 1000u}) {
    std::vector<std::atomic<int>> hits(count);
    parallel_for(count, [&](std::size_t i) { hits[i]++; }, 4);
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(500, [](std::size_t i) { if (i == 321) throw NoConvergence("x"); }, 4), NoConvergence);
}

TEST_CASE("half-plane intersection", "[geometry]") {
  using namespace hrnr::geometry;
  std::vector<HalfPlane> square;
  for (int t = 0; t < 4; ++t) square.push_back(rotated_half_plane(t * std::numbers::pi / 2.0, 1.0));
  const auto poly = intersect_half_planes(square, 1e-12);
  REQUIRE(poly);
  CHECK(poly->size() == 4);
  for (const auto& z : *poly) CHECK(std::abs(std::abs(z) - std::sqrt(2.0)) < 1e-12);
  CHECK(is_convex_ccw(*poly, 1e-12));

  // Re z <= -1 and Re(-z) <= -1 cannot both hold.
  std::vector<HalfPlane> bad{rotated_half_plane(0.0, -1.0), rotated_half_plane(std::numbers::pi, -1.0),
                             rotated_half_plane(std::numbers::pi / 2, 1.0), rotated_half_plane(-std::numbers::pi / 2, 1.0)};
  CHECK_FALSE(intersect_half_planes(bad, 1e-12));

  const std::vector<cplx> tri{{0, 0}, {1, 0}, {0, 1}};
  CHECK(polygon_contains(tri, {0.2, 0.2}, 0.0));
  CHECK_FALSE(polygon_contains(tri, {0.8, 0.8}, 1e-3));
  CHECK(distance_to_polygon(tri, {2, 0}) == Approx(1.0));
  CHECK(hausdorff_distance(tri, tri) == 0.0);
  const auto hull = convex_hull({{0, 0}, {1, 0}, {0, 1}, {0.2, 0.2}, {1, 1}});
  CHECK(hull.size() == 4);
  CHECK(wrap_angle(-0.5) == Approx(2.0 * std::numbers::pi - 0.5));
  CHECK(angle_difference(0.1, 2.0 * std::numbers::pi - 0.1) == Approx(0.2));
}
