#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hrnr/error.hpp"
#include "hrnr/linalg.hpp"
#include "hrnr/matrix.hpp"
#include "hrnr/rank_range.hpp"

namespace hrnr {

struct WitnessOptions {
  std::size_t starts = 64;
  std::size_t iterations = 500;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  std::size_t samples = kDefaultSamples;  // for the containment precondition
  double contains_eps = 1e-6;
};

namespace detail {

// Residual of the isometry system at X for B = A - zI: the real and
// imaginary parts of X*BX (k^2 complex entries), then X*X - I packed as
// diagonal real parts and upper off-diagonal real/imag parts.
struct WitnessSystem {
  const Matrix& b;
  std::size_t n;
  std::size_t k;

  [[nodiscard]] std::size_t unknowns() const { return 2 * n * k; }
  [[nodiscard]] std::size_t residuals() const { return 3 * k * k; }

  [[nodiscard]] std::vector<double> residual(const Matrix& x) const {
    std::vector<double> r;
    r.reserve(residuals());
    const Matrix xb = x.adjoint() * b * x;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        r.push_back(xb(i, j).real());
        r.push_back(xb(i, j).imag());
      }
    const Matrix g = x.adjoint() * x;
    for (std::size_t i = 0; i < k; ++i) {
      r.push_back(g(i, i).real() - 1.0);
      for (std::size_t j = i + 1; j < k; ++j) {
        r.push_back(g(i, j).real());
        r.push_back(g(i, j).imag());
      }
    }
    return r;
  }

  // Row-major R x N Jacobian. Variable 2(p k + j) is Re x_pj, the next Im x_pj.
  // Perturbing x_pj by e (e = 1 or i) changes X*MX by conj(e) e_j (MX)_{p,:}
  // + e (X*M)_{:,p} e_j^T.
  [[nodiscard]] std::vector<double> jacobian(const Matrix& x) const {
    const std::size_t rn = residuals();
    const std::size_t nn = unknowns();
    std::vector<double> jac(rn * nn, 0.0);
    const Matrix bx = b * x;
    const Matrix xb = x.adjoint() * b;
    const Matrix xa = x.adjoint();
    std::vector<cplx> d(k * k);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t j = 0; j < k; ++j)
        for (int part = 0; part < 2; ++part) {
          const cplx e = part == 0 ? cplx{1.0, 0.0} : cplx{0.0, 1.0};
          const std::size_t col = 2 * (p * k + j) + static_cast<std::size_t>(part);
          std::fill(d.begin(), d.end(), cplx{});
          for (std::size_t c = 0; c < k; ++c) d[j * k + c] += std::conj(e) * bx(p, c);
          for (std::size_t rr = 0; rr < k; ++rr) d[rr * k + j] += e * xb(rr, p);
          std::size_t row = 0;
          for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < k; ++c) {
              jac[row++ * nn + col] = d[i * k + c].real();
              jac[row++ * nn + col] = d[i * k + c].imag();
            }
          std::fill(d.begin(), d.end(), cplx{});
          for (std::size_t c = 0; c < k; ++c) d[j * k + c] += std::conj(e) * x(p, c);
          for (std::size_t rr = 0; rr < k; ++rr) d[rr * k + j] += e * xa(rr, p);
          for (std::size_t i = 0; i < k; ++i) {
            jac[row++ * nn + col] = d[i * k + i].real();
            for (std::size_t c = i + 1; c < k; ++c) {
              jac[row++ * nn + col] = d[i * k + c].real();
              jac[row++ * nn + col] = d[i * k + c].imag();
            }
          }
        }
    return jac;
  }

  [[nodiscard]] Matrix apply_step(const Matrix& x, const std::vector<double>& step) const {
    Matrix y = x;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t j = 0; j < k; ++j) y(p, j) += cplx{step[2 * (p * k + j)], step[2 * (p * k + j) + 1]};
    return y;
  }
};

inline double sum_squares(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

// Damped Gauss-Newton step, solved in whichever Gram form is smaller.
inline std::optional<std::vector<double>> lm_step(const std::vector<double>& jac, const std::vector<double>& r,
                                                  std::size_t rn, std::size_t nn, double mu) {
  if (nn <= rn) {
    std::vector<double> g(nn * nn, 0.0);
    std::vector<double> rhs(nn, 0.0);
    for (std::size_t row = 0; row < rn; ++row) {
      const double* jr = &jac[row * nn];
      for (std::size_t a = 0; a < nn; ++a) {
        rhs[a] -= jr[a] * r[row];
        for (std::size_t b = 0; b <= a; ++b) g[a * nn + b] += jr[a] * jr[b];
      }
    }
    for (std::size_t a = 0; a < nn; ++a) {
      g[a * nn + a] += mu;
      for (std::size_t b = 0; b < a; ++b) g[b * nn + a] = g[a * nn + b];
    }
    if (!cholesky_solve(std::move(g), nn, rhs)) return std::nullopt;
    return rhs;
  }
  std::vector<double> g(rn * rn, 0.0);
  for (std::size_t a = 0; a < rn; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      double s = 0.0;
      for (std::size_t c = 0; c < nn; ++c) s += jac[a * nn + c] * jac[b * nn + c];
      g[a * rn + b] = s;
      g[b * rn + a] = s;
    }
  for (std::size_t a = 0; a < rn; ++a) g[a * rn + a] += mu;
  std::vector<double> y(r);
  if (!cholesky_solve(std::move(g), rn, y)) return std::nullopt;
  std::vector<double> step(nn, 0.0);
  for (std::size_t a = 0; a < rn; ++a)
    for (std::size_t c = 0; c < nn; ++c) step[c] -= jac[a * nn + c] * y[a];
  return step;
}

inline double witness_residual(const Matrix& a, const Matrix& x, cplx z) {
  const std::size_t k = x.cols();
  return std::max(isometry_defect(x), max_abs_diff(x.adjoint() * a * x, Matrix::identity(k) * z));
}

}  // namespace detail

/**
 * Searches for an n x k isometry X with X*AX = zI_k.
 *
 * Multi-start Levenberg-Marquardt on the joint residual (X*(A - zI)X,
 * X*X - I), each start a polar-orthonormalised Gaussian matrix drawn from a
 * fixed seed sequence. Converged iterates are retracted to the nearest
 * isometry and re-verified. nullopt means the budget ran out; it does not
 * certify z outside Lambda_k(A).
 */
inline std::optional<Matrix> witness_isometry(const Matrix& a, std::size_t k, cplx z, double eps_iso,
                                              const WitnessOptions& opt = {}) {
  require_square(a, "witness_isometry");
  const std::size_t n = a.rows();
  if (k < 1 || k > n) throw RankTooLarge("witness_isometry: rank k must satisfy 1 <= k <= n");
  if (!contains(a, k, z, opt.samples, opt.contains_eps)) return std::nullopt;

  const Matrix b = a - Matrix::identity(n) * z;
  const detail::WitnessSystem sys{b, n, k};
  const std::size_t rn = sys.residuals();
  const std::size_t nn = sys.unknowns();
  const double target = 0.1 * eps_iso;

  for (std::size_t start = 0; start < opt.starts; ++start) {
    std::mt19937_64 rng(opt.seed + start);
    std::normal_distribution<double> gauss;
    Matrix x(n, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) x(i, j) = cplx{gauss(rng), gauss(rng)};
    x = polar_isometry(x);

    auto r = sys.residual(x);
    double cost = detail::sum_squares(r);
    double mu = 1e-3;
    std::size_t stalled = 0;
    for (std::size_t it = 0; it < opt.iterations; ++it) {
      double worst = 0.0;
      for (double v : r) worst = std::max(worst, std::abs(v));
      if (worst <= target) break;
      const auto jac = sys.jacobian(x);
      bool improved = false;
      for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
        const auto step = detail::lm_step(jac, r, rn, nn, mu * (1.0 + cost));
        if (!step) {
          mu *= 10.0;
          continue;
        }
        const Matrix trial = sys.apply_step(x, *step);
        auto rt = sys.residual(trial);
        const double ct = detail::sum_squares(rt);
        if (ct < cost) {
          stalled = ct > 0.999 * cost ? stalled + 1 : 0;
          x = trial;
          r = std::move(rt);
          cost = ct;
          mu = std::max(mu / 3.0, 1e-12);
          improved = true;
        } else {
          mu *= 4.0;
        }
      }
      if (!improved || stalled > 25) break;
    }
    try {
      const Matrix xi = polar_isometry(x);
      if (detail::witness_residual(a, xi, z) <= eps_iso) return xi;
    } catch (const InvalidArgument&) {
      // collapsed to a rank-deficient iterate; try the next start
    }
  }
  return std::nullopt;
}

}  // namespace hrnr
