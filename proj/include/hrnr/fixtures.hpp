#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrnr/matrix.hpp"
#include "hrnr/matrix_poly.hpp"

namespace hrnr::fixtures {

/// 8x8 nonnegative irreducible, index 4.
inline Matrix example1() {
  return Matrix{{0, 0, 3, 0, 0, 1, 0, 0}, {5, 0, 0, 0, 0, 0, 1, 0}, {0, 0, 0, 1, 9, 0, 0, 6},
                {0, 1, 0, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 4, 1, 0, 0, 2},
                {0, 0, 1, 0, 0, 3, 0, 0}, {0, 5, 0, 0, 0, 0, 0, 0}};
}

/// 4x4 complex in 3-cyclic block form.
inline Matrix example2() {
  const cplx i{0.0, 1.0};
  return Matrix{{0, 0, i, 0}, {0, 0, -i, 0}, {0, 0, 0, 2}, {cplx{3, 2}, 1, 0, 0}};
}

/// 8x8 imprimitive, index 4.
inline Matrix example3A() {
  return Matrix{{0, 0, 2, 0, 0, 6, 0, 0}, {1, 0, 0, 0, 0, 0, 7, 0}, {0, 0, 0, 2, 3, 0, 0, 4},
                {0, 3, 0, 0, 0, 0, 0, 0}, {0, 3, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 4, 0, 0, 0, 2},
                {0, 0, 1, 0, 0, 3, 0, 0}, {0, 9, 0, 0, 0, 0, 0, 0}};
}

/// 6x6 primitive companion of lambda^6 - lambda^2 - lambda - 1.
inline Matrix example3B() {
  Matrix b(6, 6);
  for (std::size_t i = 0; i + 1 < 6; ++i) b(i, i + 1) = 1.0;
  b(5, 0) = b(5, 1) = b(5, 2) = 1.0;
  return b;
}

/// n-cyclic permutation: ones on the superdiagonal and in the corner (n-1, 0).
inline Matrix cyclic_permutation(std::size_t n) {
  Matrix p(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) p(i, i + 1) = 1.0;
  p(n - 1, 0) = 1.0;
  return p;
}

/// Nonnegative block shift, levels {0,1} -> {2,3} -> {4}, connected H-pattern.
inline Matrix block_shift_demo() {
  Matrix a(5, 5);
  a(0, 2) = 1.0;
  a(0, 3) = 2.0;
  a(1, 2) = 1.0;
  a(2, 4) = 1.0;
  a(3, 4) = 2.0;
  return a;
}

inline const std::vector<std::string>& matrix_names() {
  static const std::vector<std::string> names{"example1", "example2", "example3A", "example3B", "p5", "b-shift-demo"};
  return names;
}

inline std::optional<Matrix> matrix(std::string_view name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  if (name == "example3A") return example3A();
  if (name == "example3B") return example3B();
  if (name == "p5") return cyclic_permutation(5);
  if (name == "b-shift-demo") return block_shift_demo();
  return std::nullopt;
}

/// lambda^2 - 4.
inline MatrixPolynomial poly_scalar4() { return MatrixPolynomial({Matrix{{4}}, Matrix{{0}}}); }

/// I lambda^2 - [[0, 2], [1, 0]]: companion of index 4.
inline MatrixPolynomial poly_q4() { return MatrixPolynomial({Matrix{{0, 2}, {1, 0}}, Matrix(2, 2)}); }

/// I lambda^2 - [[1, 2], [1, 1]]: companion of index 2.
inline MatrixPolynomial poly_q2() { return MatrixPolynomial({Matrix{{1, 2}, {1, 1}}, Matrix(2, 2)}); }

inline const std::vector<std::string>& polynomial_names() {
  static const std::vector<std::string> names{"poly-scalar4", "poly-q4", "poly-q2"};
  return names;
}

/// Polynomial fixtures; a matrix fixture name X gives I lambda - X.
inline std::optional<MatrixPolynomial> polynomial(std::string_view name) {
  if (name == "poly-scalar4") return poly_scalar4();
  if (name == "poly-q4") return poly_q4();
  if (name == "poly-q2") return poly_q2();
  if (auto a = matrix(name)) return MatrixPolynomial::linear(*a);
  return std::nullopt;
}

}  // namespace hrnr::fixtures
