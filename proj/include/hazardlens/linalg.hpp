#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hazardlens/errors.hpp"

namespace hazardlens {

/// Dense symmetric matrix in row-major order. Design dimensions here are
/// tiny (a handful of regression coefficients), so plain Cholesky is all
/// that is needed.
struct SymMatrix {
  std::size_t n = 0;
  std::vector<double> a;  // n * n

  explicit SymMatrix(std::size_t dim = 0) : n(dim), a(dim * dim, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  void fill(double v) { std::fill(a.begin(), a.end(), v); }
};

namespace detail {

/// Cholesky factorization A = L L^T. Returns false when A is not positive
/// definite relative to its scale.
inline bool cholesky(const SymMatrix& m, SymMatrix& l, double rel_tol = 1e-10) {
  const std::size_t n = m.n;
  l = SymMatrix(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(m(i, i)));
  if (scale == 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= rel_tol * scale) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

}  // namespace detail

/// Solves A x = b for symmetric positive-definite A; throws estimation_error
/// when A is singular (degenerate design / separation).
inline std::vector<double> solve_spd(const SymMatrix& a,
                                     const std::vector<double>& b,
                                     const char* context) {
  SymMatrix l;
  if (!detail::cholesky(a, l))
    throw estimation_error(std::string(context) +
                           ": information matrix is singular "
                           "(degenerate design or separation)");
  const std::size_t n = a.n;
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

inline bool spd_invertible(const SymMatrix& a) {
  SymMatrix l;
  return detail::cholesky(a, l);
}

/// Inverse of a symmetric positive-definite matrix.
inline SymMatrix invert_spd(const SymMatrix& a, const char* context) {
  const std::size_t n = a.n;
  SymMatrix inv(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    auto col = solve_spd(a, e, context);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

}  // namespace hazardlens
