#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "hrnr/fixtures.hpp"
#include "hrnr/structure.hpp"
#include "test_support.hpp"

using namespace hrnr;

namespace {

// Random irreducible nonnegative matrix: a Hamiltonian cycle through a random
// permutation plus random extra entries.
Matrix random_irreducible(std::mt19937_64& rng, std::size_t n, double density) {
  Matrix a = oracle::random_nonnegative(rng, n, density);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t i = 0; i < n; ++i) a(perm[i], perm[(i + 1) % n]) = 1.0 + 0.5 * static_cast<double>(i);
  return a;
}

// Random matrix in exact q-cyclic pattern with the given block sizes.
Matrix random_cyclic(std::mt19937_64& rng, const std::vector<std::size_t>& sizes, bool corner) {
  std::size_t n = 0;
  std::vector<std::size_t> start;
  for (auto s : sizes) start.push_back(n), n += s;
  const std::size_t q = sizes.size();
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Matrix a(n, n);
  for (std::size_t b = 0; b < q; ++b) {
    if (b == q - 1 && !corner) break;
    const std::size_t nb = (b + 1) % q;
    for (std::size_t i = 0; i < sizes[b]; ++i)
      for (std::size_t j = 0; j < sizes[nb]; ++j) a(start[b] + i, start[nb] + j) = u(rng);
  }
  return a;
}

}  // namespace

TEST_CASE("pattern digraph", "[structure]") {
  const auto g = pattern(fixtures::example1());
  CHECK(g.n == 8);
  CHECK(g.edge_count() == 15);
  CHECK(pattern(Matrix{{1e-3, 1}, {0, 0}}, 1e-2).edge_count() == 1);
  CHECK_THROWS_AS(pattern(Matrix(2, 3)), InvalidArgument);
}

TEST_CASE("irreducibility", "[structure]") {
  CHECK(is_irreducible(fixtures::example1()));
  CHECK(is_irreducible(fixtures::example3A()));
  CHECK(is_irreducible(fixtures::example3B()));
  CHECK(is_irreducible(fixtures::cyclic_permutation(6)));
  CHECK_FALSE(is_irreducible(Matrix{{1, 1}, {0, 1}}));
  CHECK_FALSE(is_irreducible(Matrix{{0}}));
  CHECK(is_irreducible(Matrix{{2}}));
  CHECK_FALSE(is_irreducible(fixtures::block_shift_demo()));
}

TEST_CASE("irreducibility agrees with transitive closure", "[structure][property]") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const Matrix a = oracle::random_nonnegative(rng, n, 0.25);
    CHECK(is_irreducible(a) == oracle::strongly_connected(a));
  }
}

TEST_CASE("index of imprimitivity on fixtures", "[structure]") {
  CHECK(imprimitivity_index(fixtures::example1()) == 4);
  CHECK(imprimitivity_index(fixtures::example3A()) == 4);
  CHECK(imprimitivity_index(fixtures::example3B()) == 1);
  CHECK(imprimitivity_index(fixtures::example2()) == 3);
  for (std::size_t n = 1; n <= 9; ++n) CHECK(imprimitivity_index(fixtures::cyclic_permutation(n)) == n);
  CHECK_THROWS_AS(imprimitivity_index(Matrix{{1, 1}, {0, 1}}), NotIrreducible);
}

TEST_CASE("index of imprimitivity agrees with cycle-length gcd", "[structure][property]") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const Matrix a = random_irreducible(rng, n, trial % 3 == 0 ? 0.0 : 0.12);
    CHECK(imprimitivity_index(a) == oracle::period_by_powers(a));
  }
  // Planted cyclic structure, hidden by a random relabelling.
  for (int trial = 0; trial < 60; ++trial) {
    std::uniform_int_distribution<std::size_t> qd(2, 5), sd(1, 3);
    std::vector<std::size_t> sizes(qd(rng));
    for (auto& s : sizes) s = sd(rng);
    const Matrix c = random_cyclic(rng, sizes, true);
    std::vector<std::size_t> perm(c.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Matrix a = permute_symmetric(c, perm);
    CHECK(imprimitivity_index(a) == sizes.size());
  }
}

TEST_CASE("cyclic normal form", "[structure]") {
  for (const auto& a : {fixtures::example1(), fixtures::example3A(), fixtures::cyclic_permutation(5)}) {
    const auto cs = cyclic_normal_form(a);
    const Matrix c = cs.permuted(a);
    std::size_t total = 0;
    for (auto s : cs.block_sizes) total += s;
    CHECK(total == a.rows());
    for (std::size_t i = 0; i < c.rows(); ++i)
      for (std::size_t j = 0; j < c.cols(); ++j)
        if (std::abs(c(i, j)) > 0.0) CHECK(cs.block_of_position(j) == (cs.block_of_position(i) + 1) % cs.q);
    CHECK(max_abs_diff(cs.unpermuted(c), a) == 0.0);
    CHECK_FALSE(cs.block_shift);  // irreducible: the corner block is never zero
  }
  const auto e3 = cyclic_normal_form(fixtures::example3A());
  CHECK(e3.q == 4);
  CHECK(e3.block_sizes == std::vector<std::size_t>{2, 2, 3, 1});
  CHECK(cyclic_normal_form(fixtures::example3B()).q == 1);
  CHECK_THROWS_AS(cyclic_normal_form(Matrix{{0, 1}, {0, 0}}), NotIrreducible);
}

TEST_CASE("diagonal similarity to a rotation", "[structure]") {
  const Matrix a = fixtures::example3A();
  const auto ps = phase_similarity_index(a);
  REQUIRE(ps.q);
  CHECK(*ps.q == 4);
  const double phi = 2.0 * std::numbers::pi / 4.0;
  const Matrix d = ps.similarity_diagonal(phi);
  const Matrix lhs = d.adjoint() * a * d;
  CHECK(max_abs_diff(lhs, a * std::polar(1.0, phi)) < 1e-14);

  CHECK(phase_similarity_index(fixtures::block_shift_demo()).unbounded());
  CHECK(*phase_similarity_index(fixtures::example3B()).q == 1);
  CHECK_THROWS_AS(phase_similarity_index(Matrix{{1, 0}, {0, 1}}), NotConnected);
  CHECK_THROWS_AS(phase_similarity_index(Matrix{{0, -1}, {1, 0}}), NotNonnegative);
}

TEST_CASE("diagonal similarity property", "[structure][property]") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const Matrix a = random_irreducible(rng, n, 0.1);
    const auto ps = phase_similarity_index(a);
    if (ps.unbounded()) continue;
    const double phi = 2.0 * std::numbers::pi / static_cast<double>(*ps.q);
    const Matrix d = ps.similarity_diagonal(phi);
    CHECK(max_abs_diff(d.adjoint() * a * d, a * std::polar(1.0, phi)) < 1e-12);
  }
}

TEST_CASE("block-shift detection", "[structure]") {
  const auto bs = is_block_shift(fixtures::block_shift_demo());
  CHECK(bs.block_shift);
  CHECK(bs.levels == std::vector<long>{0, 0, 1, 1, 2});
  CHECK_FALSE(is_block_shift(fixtures::cyclic_permutation(4)).block_shift);
  CHECK_FALSE(is_block_shift(Matrix(3, 3)).block_shift);
  CHECK(is_block_shift(Matrix{{0, 0, 1}, {0, 0, 2}, {0, 0, 0}}).block_shift);

  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 40; ++trial) {
    const Matrix c = random_cyclic(rng, {2, 1, 3}, false);
    std::vector<std::size_t> perm(c.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK(is_block_shift(permute_symmetric(c, perm)).block_shift);
  }
}

TEST_CASE("connectivity of the Hermitian pattern", "[structure]") {
  CHECK(hermitian_pattern_irreducible(fixtures::block_shift_demo()));
  CHECK_FALSE(hermitian_pattern_irreducible(Matrix{{1, 0}, {0, 1}}));
  CHECK(hermitian_pattern_irreducible(Matrix{{0, 1}, {0, 0}}));
  CHECK_FALSE(hermitian_pattern_irreducible(Matrix{{0}}));
  // H(A) can vanish entrywise where A does not.
  CHECK_FALSE(hermitian_pattern_irreducible(Matrix{{0, 1}, {-1, 0}}));
}
