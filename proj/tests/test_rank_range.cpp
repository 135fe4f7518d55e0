#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "hrnr/fixtures.hpp"
#include "hrnr/geometry.hpp"
#include "hrnr/perron.hpp"
#include "hrnr/rank_range.hpp"
#include "hrnr/witness.hpp"
#include "test_support.hpp"

using namespace hrnr;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// h_k(theta) of a normal matrix from its eigenvalues: k-th largest Re(e^{i theta} lambda).
double normal_support(const std::vector<cplx>& eig, std::size_t k, double theta) {
  std::vector<double> v;
  for (const auto& l : eig) v.push_back((std::polar(1.0, theta) * l).real());
  std::sort(v.begin(), v.end(), std::greater<>());
  return v[k - 1];
}

Matrix random_normal(std::mt19937_64& rng, const std::vector<cplx>& eig) {
  const Matrix u = oracle::random_unitary(rng, eig.size());
  return u * Matrix::diagonal(eig) * u.adjoint();
}

Matrix block_nilpotent(const Matrix& a1) {
  const std::size_t p = a1.rows(), q = a1.cols();
  Matrix a(p + q, p + q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) a(i, p + j) = a1(i, j);
  return a;
}

// Random p x q matrix of the given rank.
Matrix random_rank(std::mt19937_64& rng, std::size_t p, std::size_t q, std::size_t r) {
  return oracle::random_complex(rng, p, r) * oracle::random_complex(rng, r, q);
}

double spacing_error(const std::vector<cplx>& pts) {
  std::vector<double> ang;
  for (const auto& z : pts) ang.push_back(geometry::wrap_angle(std::arg(z)));
  std::sort(ang.begin(), ang.end());
  const double s = 2.0 * kPi / static_cast<double>(ang.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ang.size(); ++i) {
    const double next = i + 1 < ang.size() ? ang[i + 1] : ang[0] + 2.0 * kPi;
    worst = std::max(worst, std::abs(next - ang[i] - s));
  }
  return worst;
}

}  // namespace

TEST_CASE("support profile matches the normal-matrix oracle", "[range]") {
  std::mt19937_64 rng(201);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    std::vector<cplx> eig(n);
    std::normal_distribution<double> g;
    for (auto& l : eig) l = cplx{g(rng), g(rng)};
    const Matrix a = random_normal(rng, eig);
    for (std::size_t k = 1; k <= n; ++k) {
      const auto p = support_profile(a, k, 64);
      for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(p.values[i] == Approx(normal_support(eig, k, p.angles[i])).margin(1e-9));
    }
  }
}

TEST_CASE("support profile arguments", "[range]") {
  const Matrix a = fixtures::example2();
  CHECK_THROWS_AS(support_profile(a, 0, 32), RankTooLarge);
  CHECK_THROWS_AS(support_profile(a, 5, 32), RankTooLarge);
  CHECK_THROWS_AS(support_profile(a, 1, 8), InvalidArgument);
  CHECK_THROWS_AS(support_profile(Matrix(2, 3), 1, 32), InvalidArgument);
  const auto p = support_profile(a, 1, 32);
  const auto d = doubled_profile(a, p);
  REQUIRE(d.size() == 64);
  for (std::size_t i = 0; i < 32; ++i) CHECK(d.values[2 * i] == p.values[i]);
  for (std::size_t i = 0; i < 64; ++i) CHECK(d.angles[i] == Approx(2.0 * kPi * i / 64.0));
}

TEST_CASE("rank-k range of a normal matrix", "[range]") {
  // Square with vertices +-1, +-i: Lambda_1 is the square, Lambda_2 the origin.
  std::mt19937_64 rng(203);
  const std::vector<cplx> eig{1.0, cplx{0, 1}, -1.0, cplx{0, -1}};
  const Matrix a = random_normal(rng, eig);
  const auto r1 = region(a, 1, 720);
  REQUIRE_FALSE(r1.empty);
  CHECK(oracle::support_distance(r1.vertices, eig) < 1e-6);
  const auto r2 = region(a, 2, 720);
  REQUIRE_FALSE(r2.empty);
  CHECK(r2.max_modulus() < 1e-6);
  CHECK(region(a, 3, 720).empty);
  CHECK(radius(a, 1) == Approx(1.0).margin(1e-6));

  // Hermitian: Lambda_k = [lambda_{n-k+1}, lambda_k], empty once 2k > n + 1.
  const Matrix h = oracle::random_hermitian(rng, 5);
  const auto ev = oracle::hermitian_eigenvalues(h);
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto rk = region(h, k, 360);
    REQUIRE_FALSE(rk.empty);
    const std::vector<cplx> seg{ev[5 - k], ev[k - 1]};
    CHECK(oracle::support_distance(rk.vertices, seg) < 1e-6);
  }
  CHECK(region(h, 4, 360).empty);
}

TEST_CASE("scalar and identity matrices collapse to a point", "[range]") {
  const Matrix id = Matrix::identity(5);
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto r = region(id, k, 360);
    REQUIRE_FALSE(r.empty);
    for (const auto& v : r.vertices) CHECK(std::abs(v - 1.0) < 1e-6);
    CHECK(contains(id, k, 1.0));
    CHECK_FALSE(contains(id, k, 1.01));
  }
  const auto m = maximal_elements(Matrix::identity(3) * cplx{0, 2}, 2);
  const auto pts = maximal_points(m);
  REQUIRE(pts.size() == 1);
  CHECK(std::abs(pts[0] - cplx{0, 2}) < 1e-6);
  CHECK(maximal_elements(Matrix(3, 3), 1).index() == 2);
}

TEST_CASE("empty range raises", "[range]") {
  const Matrix d = Matrix::diagonal(std::vector<cplx>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(maximal_elements(d, 3), EmptyRegion);
  CHECK_THROWS_AS(attainment_angle(d, 3), EmptyRegion);
  CHECK(std::isinf(radius(d, 3)));
  CHECK_THROWS_AS(attainment_angle(Matrix(3, 3), 1), ZeroRadius);
}

TEST_CASE("nested ranges", "[range][property]") {
  std::mt19937_64 rng(205);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const Matrix a = oracle::random_complex(rng, n, n);
    auto prev = region(a, 1, 180);
    for (std::size_t k = 2; k <= n; ++k) {
      const auto cur = region(a, k, 180);
      if (cur.empty) break;
      for (const auto& v : cur.vertices) CHECK(prev.contains(v, 1e-8));
      prev = cur;
    }
  }
}

TEST_CASE("translation, scaling and rotation covariance", "[range][property]") {
  std::mt19937_64 rng(207);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + trial % 4;
    const Matrix a = oracle::random_complex(rng, n, n);
    const cplx shift{0.7, -0.3};
    const double scale = 2.5;
    const double phi = 2.0 * kPi / 8.0;  // exact lattice rotation for m = 64
    const auto p = support_profile(a, 1, 64);
    const auto ps = support_profile(a * scale + Matrix::identity(n) * shift, 1, 64);
    const auto pr = support_profile(a * std::polar(1.0, phi), 1, 64);
    for (std::size_t i = 0; i < 64; ++i) {
      const double shifted = scale * p.values[i] + (std::polar(1.0, p.angles[i]) * shift).real();
      CHECK(ps.values[i] == Approx(shifted).margin(1e-9));
      CHECK(pr.values[i] == Approx(p.values[(i + 8) % 64]).margin(1e-9));
    }
    // Unitary similarity leaves the profile unchanged.
    const Matrix u = oracle::random_unitary(rng, n);
    const auto pu = support_profile(u.adjoint() * a * u, 2, 64);
    const auto p2 = support_profile(a, 2, 64);
    for (std::size_t i = 0; i < 64; ++i) CHECK(pu.values[i] == Approx(p2.values[i]).margin(1e-9));
  }
}

TEST_CASE("block-nilpotent ranges are discs of radius sigma_j / 2", "[range][property]") {
  std::mt19937_64 rng(209);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t p = 1 + trial % 4, q = 2 + trial % 3;
    const std::size_t rank = 1 + trial % std::min(p, q);
    const Matrix a1 = random_rank(rng, p, q, rank);
    const auto sv = singular_values(a1);
    const Matrix a = block_nilpotent(a1);
    for (std::size_t j = 1; j <= rank; ++j) {
      CHECK(radius(a, j, 360) == Approx(sv[j - 1] / 2.0).margin(1e-6));
      CHECK(is_circular_disc(a, j, 360, 1e-6));
      CHECK(maximal_elements(a, j, 360, 1e-6).index() == 0);
    }
  }
}

TEST_CASE("numerical radius bounds", "[range][property]") {
  std::mt19937_64 rng(211);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const Matrix a = oracle::random_complex(rng, n, n);
    const double r = radius(a, 1, 360);
    double rho = 0.0;
    for (const auto& l : oracle::eigenvalues(a)) rho = std::max(rho, std::abs(l));
    const double norm2 = singular_values(a)[0];
    CHECK(rho <= r + 1e-8);
    CHECK(norm2 / 2.0 <= r + 1e-8);
    CHECK(r <= norm2 + 1e-8);
    for (std::size_t k = 2; 2 * k <= n + 1; ++k) {
      const double rk = radius(a, k, 180);
      if (std::isfinite(rk)) CHECK(rk <= r + 1e-8);
    }
  }
}

TEST_CASE("maximal elements of example 3A", "[range]") {
  const Matrix a = fixtures::example3A();
  const double expected_angle[] = {0.0, kPi / 4.0, 0.0};
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto m = maximal_elements(a, k);
    const auto* f = std::get_if<FiniteSet>(&m);
    REQUIRE(f != nullptr);
    CHECK(f->count == 4);
    CHECK(spacing_error(f->points) < 1e-3);
    CHECK(f->nearest_base == Approx(expected_angle[k - 1]).margin(1e-12));
    CHECK(f->base_gap < 1e-3);
    CHECK(attainment_angle(a, k) == Approx(expected_angle[k - 1]).margin(1e-3));
    for (const auto& z : f->points) CHECK(std::abs(z) == Approx(f->radius).margin(1e-6));
  }
}

TEST_CASE("example 3B, a primitive companion matrix", "[range]") {
  const Matrix b = fixtures::example3B();
  const double root = oracle::sextic_root();
  const auto m1 = maximal_elements(b, 1);
  const auto p1 = maximal_points(m1);
  REQUIRE(p1.size() == 1);
  CHECK(p1[0].real() > root);
  CHECK(std::abs(p1[0].imag()) < 1e-5);
  CHECK(p1[0].real() == Approx(support_value(b, 1, 0.0)).margin(1e-6));
  const auto p2 = maximal_points(maximal_elements(b, 2));
  REQUIRE(p2.size() == 2);
  CHECK(std::abs(p2[0] - std::conj(p2[1])) < 1e-4);
  CHECK(std::abs(p2[0].imag()) > 0.1);
}

TEST_CASE("rotational invariance under the cyclic index", "[range][property]") {
  CHECK(rotational_deviation(fixtures::example2(), 1, 3) < 1e-9);
  CHECK(rotational_deviation(fixtures::example2(), 2, 3) < 1e-9);
  CHECK(check_rotational_invariance(fixtures::example1(), 2, 4, 720, 1e-9));
  CHECK_FALSE(check_rotational_invariance(fixtures::example3B(), 1, 2, 720, 1e-3));
  CHECK_THROWS_AS(rotational_deviation(fixtures::example2(), 1, 0), InvalidArgument);

  std::mt19937_64 rng(213);
  for (int trial = 0; trial < 15; ++trial) {
    // Random complex entries on a planted cyclic pattern.
    const std::size_t q = 2 + trial % 4;
    const std::size_t n = q + trial % 3;
    std::vector<std::size_t> level(n);
    for (std::size_t i = 0; i < n; ++i) level[i] = i % q;
    Matrix a(n, n);
    std::normal_distribution<double> g;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (level[j] == (level[i] + 1) % q) a(i, j) = cplx{g(rng), g(rng)};
    for (std::size_t k = 1; k <= n; ++k) CHECK(rotational_deviation(a, k, q, 240) < 1e-9);
  }
}

TEST_CASE("axis symmetries of real matrices", "[range]") {
  const auto rep = check_axis_symmetries(fixtures::example3A(), 1, 720, 1e-9);
  CHECK(rep.q == 4);
  CHECK(rep.real_axis);
  CHECK(rep.lines_Lpm);
  const auto rb = check_axis_symmetries(fixtures::example3B(), 2, 720, 1e-9);
  CHECK(rb.real_axis);
  CHECK_THROWS_AS(check_axis_symmetries(fixtures::example2(), 1, 720, 1e-9), InvalidArgument);
}

TEST_CASE("cyclic permutation ranges are polygons", "[range]") {
  const Matrix p5 = fixtures::cyclic_permutation(5);
  const auto r = region(p5, 2, 1440);
  const auto poly = cyclic_polygon(5, 2);
  CHECK(geometry::hausdorff_distance(r.vertices, poly) < 1e-4);
  CHECK(radius(p5, 2) == Approx(std::cos(2.0 * kPi / 5.0) / std::cos(kPi / 5.0)).margin(1e-6));
  CHECK(geometry::hausdorff_distance(region(p5, 1, 1440).vertices, oracle::roots_of_unity(5)) < 1e-4);

  const Matrix p7 = fixtures::cyclic_permutation(7);
  for (std::size_t k = 1; k <= 3; ++k)
    CHECK(geometry::hausdorff_distance(region(p7, k, 1400).vertices, cyclic_polygon(7, k)) < 1e-4);
  CHECK_THROWS_AS(cyclic_polygon(4, 2), RankTooLarge);
}

TEST_CASE("maximal point classification", "[range]") {
  const auto sq = oracle::roots_of_unity(4, 2.0);
  auto m = classify_maximal_points(2.0, sq, 4, 1e-3);
  REQUIRE(m.index() == 1);
  CHECK(std::get<FiniteSet>(m).nearest_base == 0.0);

  std::vector<cplx> rotated;
  for (const auto& z : sq) rotated.push_back(z * std::polar(1.0, kPi / 4.0));
  m = classify_maximal_points(2.0, rotated, 4, 1e-3);
  REQUIRE(m.index() == 1);
  CHECK(std::get<FiniteSet>(m).nearest_base == Approx(kPi / 4.0));
  CHECK(std::get<FiniteSet>(m).base_gap < 1e-12);

  m = classify_maximal_points(1.0, {1.0, cplx{0, 1}}, std::nullopt, 1e-3);
  CHECK(m.index() == 2);
}

TEST_CASE("isometry witnesses", "[range][witness]") {
  std::mt19937_64 rng(215);
  WitnessOptions opt;
  opt.samples = 180;
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t k = 1 + trial % 2;
    const std::size_t n = 3 * k - 2 + 2 + trial % 2;  // n >= 3k - 2 guarantees a nonempty range
    const Matrix a = oracle::random_complex(rng, n, n);
    const auto reg = region(a, k, 180);
    REQUIRE_FALSE(reg.empty);
    cplx c = 0.0;
    for (const auto& v : reg.vertices) c += v;
    c /= static_cast<double>(reg.vertices.size());
    const auto x = witness_isometry(a, k, c, 1e-9, opt);
    REQUIRE(x.has_value());
    CHECK(x->rows() == n);
    CHECK(x->cols() == k);
    CHECK(isometry_defect(*x) < 1e-9);
    CHECK(max_abs_diff(x->adjoint() * a * *x, Matrix::identity(k) * c) < 1e-9);
  }
  // Outside the range there is nothing to find.
  const Matrix a = fixtures::example2();
  CHECK_FALSE(witness_isometry(a, 1, cplx{10, 0}, 1e-9, opt).has_value());
}

TEST_CASE("compressions land inside the range", "[range][property]") {
  std::mt19937_64 rng(217);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const Matrix a = oracle::random_complex(rng, n, n);
    const auto p = support_profile(a, 1, 360);
    for (int s = 0; s < 200; ++s) {
      const Matrix x = oracle::random_unitary(rng, n, 1);
      const cplx z = (x.adjoint() * a * x)(0, 0);
      CHECK(contains(p, z, 1e-9));
    }
  }
}
