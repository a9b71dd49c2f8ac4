#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hazardlens/rng.hpp"
#include "hazardlens/step_function.hpp"
#include "hazardlens/types.hpp"

namespace testutil {

/// sup_t |S_hat(t) - S(t)| against a reference survival function, evaluated
/// at the sample points (where the sup of the step difference is attained).
inline double ks_distance_survival(std::vector<double> times,
                                   const std::function<double(double)>& surv) {
  std::sort(times.begin(), times.end());
  const double n = static_cast<double>(times.size());
  double d = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double s = surv(times[i]);
    double after = (n - static_cast<double>(i + 1)) / n;   // S_hat(t_i)
    double before = (n - static_cast<double>(i)) / n;      // S_hat(t_i-)
    d = std::max({d, std::fabs(after - s), std::fabs(before - s)});
  }
  return d;
}

/// O(n^2) concordance count, the independent oracle for the fast estimator.
inline double kendall_brute(const std::vector<double>& x,
                            const std::vector<double>& y) {
  const std::size_t n = x.size();
  long long num = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0)
        ++num;
      else if (s < 0)
        --num;
    }
  return static_cast<double>(num) /
         (0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1));
}

/// Plain proportional-hazards sample: constant baseline rate, arm flipped
/// by a fair coin, no censoring.
inline std::vector<hazardlens::SurvivalSample> plain_cox_sample(
    double beta, double rate, std::size_t n, hazardlens::SeedSpec seed) {
  hazardlens::RngStream rng(seed);
  std::vector<hazardlens::SurvivalSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    hazardlens::SurvivalSample s;
    s.id = std::to_string(i + 1);
    s.arm = rng.bernoulli(0.5) ? 1 : 0;
    s.time = rng.exponential() / (rate * std::exp(beta * s.arm));
    s.status = 1;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace testutil
