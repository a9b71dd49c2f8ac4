#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "hazardlens/errors.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

namespace detail {

/// Counts inversions by merge sort, in place.
inline std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& tmp,
                                 std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = merge_count(v, tmp, lo, mid) + merge_count(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
            tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

inline std::uint64_t tie_pairs(const std::vector<double>& sorted) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    std::uint64_t t = j - i;
    s += t * (t - 1) / 2;
    i = j;
  }
  return s;
}

}  // namespace detail

/// Kendall's tau by Knight's O(n log n) merge-sort algorithm (tau-b, which
/// coincides with tau-a when there are no ties).
inline double kendall_tau(const std::vector<double>& x,
                          const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2)
    throw input_error("kendall_tau: need two equal-length samples, n >= 2");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  std::vector<double> xs(n), ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = x[idx[k]];
    ys[k] = y[idx[k]];
  }

  // pairs tied on x, and tied on both
  std::uint64_t n1 = 0, n3 = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && xs[j] == xs[i]) ++j;
    std::uint64_t t = j - i;
    n1 += t * (t - 1) / 2;
    for (std::size_t a = i; a < j;) {
      std::size_t b = a;
      while (b < j && ys[b] == ys[a]) ++b;
      std::uint64_t u = b - a;
      n3 += u * (u - 1) / 2;
      a = b;
    }
    i = j;
  }

  std::vector<double> tmp(n);
  std::uint64_t swaps = detail::merge_count(ys, tmp, 0, n);
  std::sort(ys.begin(), ys.end());
  std::uint64_t n2 = detail::tie_pairs(ys);

  const double n0 = 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  double num = n0 - static_cast<double>(n1) - static_cast<double>(n2) +
               static_cast<double>(n3) - 2.0 * static_cast<double>(swaps);
  double den = std::sqrt((n0 - static_cast<double>(n1)) *
                         (n0 - static_cast<double>(n2)));
  return num / den;
}

inline double kendall_tau(const std::vector<PotentialOutcomePair>& pairs) {
  std::vector<double> t0, t1;
  t0.reserve(pairs.size());
  t1.reserve(pairs.size());
  for (const auto& p : pairs) {
    t0.push_back(p.t0);
    t1.push_back(p.t1);
  }
  return kendall_tau(t0, t1);
}

/// Inverts tau = theta / (theta + 2) for the shared-Gamma coupling.
inline double theta_from_tau(double tau) {
  if (!(tau >= 0.0) || tau >= 1.0)
    throw input_error("theta_from_tau: tau must be in [0, 1)");
  return 2.0 * tau / (1.0 - tau);
}

inline double tau_from_theta(double theta) { return theta / (theta + 2.0); }

}  // namespace hazardlens
