#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "hrnr/error.hpp"
#include "hrnr/linalg.hpp"
#include "hrnr/matrix.hpp"

namespace hrnr {

/// Directed graph of the nonzero pattern: u -> v iff |a_uv| > eps_pattern.
struct PatternDigraph {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::vector<std::size_t>> in;

  [[nodiscard]] std::size_t edge_count() const {
    std::size_t c = 0;
    for (const auto& adj : out) c += adj.size();
    return c;
  }

  [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t u = 0; u < n; ++u)
      for (auto v : out[u]) e.emplace_back(u, v);
    return e;
  }
};

inline PatternDigraph pattern(const Matrix& a, double eps_pattern = 0.0) {
  require_square(a, "pattern");
  if (eps_pattern < 0.0) throw InvalidArgument("pattern: eps_pattern must be >= 0");
  PatternDigraph g;
  g.n = a.rows();
  g.out.resize(g.n);
  g.in.resize(g.n);
  for (std::size_t u = 0; u < g.n; ++u)
    for (std::size_t v = 0; v < g.n; ++v)
      if (std::abs(a(u, v)) > eps_pattern) {
        g.out[u].push_back(v);
        g.in[v].push_back(u);
      }
  return g;
}

namespace detail {

inline std::vector<bool> reachable(const std::vector<std::vector<std::size_t>>& adj, std::size_t root) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{root};
  seen[root] = true;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
  }
  return seen;
}

inline bool all_true(const std::vector<bool>& v) {
  return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

inline std::vector<std::size_t> bfs_levels(const PatternDigraph& g, std::size_t root) {
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> level(g.n, unset);
  std::queue<std::size_t> queue;
  level[root] = 0;
  queue.push(root);
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop();
    for (auto v : g.out[u])
      if (level[v] == unset) {
        level[v] = level[u] + 1;
        queue.push(v);
      }
  }
  return level;
}

struct ComponentGrading {
  std::vector<std::size_t> vertices;
  long gcd = 0;  // 0: exact grading, no cycle constrains it
};

// Integer potential with l(v) = l(u) + 1 across every directed edge u -> v,
// built on a BFS spanning tree of the undirected pattern. The gcd of the
// non-tree discrepancies is the largest q for which the potential is
// consistent modulo q.
inline ComponentGrading grade_component(const PatternDigraph& g, std::size_t root, std::vector<long>& potential,
                                        std::vector<bool>& visited) {
  ComponentGrading c;
  std::queue<std::size_t> queue;
  visited[root] = true;
  potential[root] = 0;
  queue.push(root);
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop();
    c.vertices.push_back(u);
    for (auto v : g.out[u])
      if (!visited[v]) {
        visited[v] = true;
        potential[v] = potential[u] + 1;
        queue.push(v);
      }
    for (auto w : g.in[u])
      if (!visited[w]) {
        visited[w] = true;
        potential[w] = potential[u] - 1;
        queue.push(w);
      }
  }
  for (auto u : c.vertices)
    for (auto v : g.out[u]) c.gcd = std::gcd(c.gcd, std::labs(potential[u] + 1 - potential[v]));
  return c;
}

inline bool undirected_connected(const std::vector<std::vector<std::size_t>>& adj) {
  return adj.empty() || all_true(reachable(adj, 0));
}

}  // namespace detail

/**
 * True iff the pattern digraph is strongly connected. A 1x1 matrix is
 * irreducible iff it is nonzero.
 */
inline bool is_irreducible(const Matrix& a, double eps_pattern = 0.0) {
  const auto g = pattern(a, eps_pattern);
  if (g.n == 1) return !g.out[0].empty();
  return detail::all_true(detail::reachable(g.out, 0)) && detail::all_true(detail::reachable(g.in, 0));
}

/// Period of the strongly connected pattern digraph: gcd over edges u -> v
/// of level(u) + 1 - level(v), levels being BFS distances from vertex 0.
inline std::size_t imprimitivity_index(const Matrix& a, double eps_pattern = 0.0) {
  if (!is_irreducible(a, eps_pattern)) throw NotIrreducible("imprimitivity_index: matrix is reducible");
  const auto g = pattern(a, eps_pattern);
  const auto level = detail::bfs_levels(g, 0);
  long q = 0;
  for (const auto& [u, v] : g.edges())
    q = std::gcd(q, std::labs(static_cast<long>(level[u]) + 1 - static_cast<long>(level[v])));
  return static_cast<std::size_t>(q);
}

/// Cyclic normal form of an irreducible matrix.
struct CyclicStructure {
  bool irreducible = false;
  std::size_t q = 1;
  std::vector<std::size_t> levels;       // per vertex, in [0, q)
  std::vector<std::size_t> permutation;  // new position -> original vertex
  std::vector<std::size_t> block_sizes;
  bool block_shift = false;

  /// P^T A P: levels 0..q-1 contiguous.
  [[nodiscard]] Matrix permuted(const Matrix& a) const { return permute_symmetric(a, permutation); }

  /// Inverse of permuted().
  [[nodiscard]] Matrix unpermuted(const Matrix& c) const {
    Matrix a(c.rows(), c.cols());
    for (std::size_t i = 0; i < permutation.size(); ++i)
      for (std::size_t j = 0; j < permutation.size(); ++j) a(permutation[i], permutation[j]) = c(i, j);
    return a;
  }

  [[nodiscard]] std::size_t block_of_position(std::size_t pos) const {
    std::size_t acc = 0;
    for (std::size_t b = 0; b < block_sizes.size(); ++b) {
      acc += block_sizes[b];
      if (pos < acc) return b;
    }
    return block_sizes.size();
  }
};

inline CyclicStructure cyclic_normal_form(const Matrix& a, double eps_pattern = 0.0) {
  const std::size_t q = imprimitivity_index(a, eps_pattern);
  const auto g = pattern(a, eps_pattern);
  const auto bfs = detail::bfs_levels(g, 0);

  CyclicStructure cs;
  cs.irreducible = true;
  cs.q = q;
  cs.levels.resize(g.n);
  for (std::size_t v = 0; v < g.n; ++v) cs.levels[v] = bfs[v] % q;
  cs.block_sizes.assign(q, 0);
  for (std::size_t level = 0; level < q; ++level)
    for (std::size_t v = 0; v < g.n; ++v)
      if (cs.levels[v] == level) {
        cs.permutation.push_back(v);
        ++cs.block_sizes[level];
      }

  for (const auto& [u, v] : g.edges())
    if (cs.levels[v] != (cs.levels[u] + 1) % q) throw PatternViolation("cyclic_normal_form: edge violates grading");

  const Matrix c = cs.permuted(a);
  bool corner_nonzero = false;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      if (std::abs(c(i, j)) <= eps_pattern) continue;
      const auto bi = cs.block_of_position(i);
      const auto bj = cs.block_of_position(j);
      if (bj != (bi + 1) % q) throw PatternViolation("cyclic_normal_form: nonzero outside the cyclic block pattern");
      if (q > 1 && bi == q - 1) corner_nonzero = true;
    }
  cs.block_shift = q > 1 && !corner_nonzero;
  return cs;
}

/// Largest q with A diagonally similar to e^{2 pi i/q} A; q empty when every
/// rotation is (exact grading). `potential` gives D = diag(e^{i l(v) 2 pi/q}).
struct PhaseSimilarity {
  std::optional<std::size_t> q;
  std::vector<long> potential;

  [[nodiscard]] bool unbounded() const noexcept { return !q.has_value(); }

  /// D with D^{-1} A D = e^{i phi} A, phi = 2 pi/q, or any phi when unbounded.
  [[nodiscard]] Matrix similarity_diagonal(double phi) const {
    std::vector<cplx> d(potential.size());
    for (std::size_t v = 0; v < d.size(); ++v) d[v] = std::polar(1.0, phi * static_cast<double>(potential[v]));
    return Matrix::diagonal(d);
  }
};

inline PhaseSimilarity phase_similarity_index(const Matrix& a, double eps_pattern = 0.0) {
  require_square(a, "phase_similarity_index");
  if (!a.is_nonnegative()) throw NotNonnegative("phase_similarity_index: matrix must be entrywise nonnegative");
  const auto g = pattern(a, eps_pattern);
  std::vector<long> potential(g.n, 0);
  std::vector<bool> visited(g.n, false);
  const auto comp = detail::grade_component(g, 0, potential, visited);
  if (comp.vertices.size() != g.n) throw NotConnected("phase_similarity_index: undirected pattern is disconnected");
  PhaseSimilarity ps;
  ps.potential = std::move(potential);
  if (comp.gcd != 0) ps.q = static_cast<std::size_t>(comp.gcd);
  return ps;
}

struct BlockShiftResult {
  bool block_shift = false;
  std::vector<long> levels;  // grading, min level 0 in each weak component
};

/**
 * True iff a permutation puts A in cyclic form with a zero corner block:
 * every weakly connected component of the pattern admits an exact grading
 * and at least two levels are occupied.
 */
inline BlockShiftResult is_block_shift(const Matrix& a, double eps_pattern = 0.0) {
  const auto g = pattern(a, eps_pattern);
  BlockShiftResult r;
  r.levels.assign(g.n, 0);
  std::vector<bool> visited(g.n, false);
  bool graded = true;
  for (std::size_t root = 0; root < g.n; ++root) {
    if (visited[root]) continue;
    const auto comp = detail::grade_component(g, root, r.levels, visited);
    if (comp.gcd != 0) graded = false;
    long lo = r.levels[root];
    for (auto v : comp.vertices) lo = std::min(lo, r.levels[v]);
    for (auto v : comp.vertices) r.levels[v] -= lo;
  }
  r.block_shift = graded && g.edge_count() > 0;
  if (!r.block_shift) r.levels.clear();
  return r;
}

/// True iff the undirected pattern of H(A) is connected (n = 1: H(A) != 0).
inline bool hermitian_pattern_irreducible(const Matrix& a, double eps_pattern = 0.0) {
  const auto h = hermitian_part(a);
  const auto g = pattern(h, eps_pattern);
  if (g.n == 1) return !g.out[0].empty();
  return detail::undirected_connected(g.out);
}

}  // namespace hrnr
