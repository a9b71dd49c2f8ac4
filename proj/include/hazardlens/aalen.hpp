#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "hazardlens/cox.hpp"
#include "hazardlens/errors.hpp"
#include "hazardlens/linalg.hpp"
#include "hazardlens/rng.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

/// Aalen additive-hazards fit: cumulative regression coefficients B(t)
/// accumulated from least-squares increments at each event time. Column 0
/// is the intercept; remaining columns follow the covariate selector.
/// Estimation stops at the last time the at-risk design has full rank.
struct AalenFit {
  std::vector<double> times;          // event times with increments
  std::size_t p = 0;                  // design dimension incl. intercept
  std::vector<double> cumcoef;        // times.size() * p, B(t_k)
  std::vector<double> pointwise_var;  // times.size() * p, Var{B(t_k)} diagonal
  std::vector<double> increment;      // times.size() * p, dB(t_k)
  std::vector<double> increment_var;  // times.size() * p
  std::vector<double> leverage;       // times.size() * p, diag (X'X)^-1 at t_k
  std::vector<int> n_risk;            // at-risk count at t_k
  std::vector<int> n_events;          // events at t_k
  bool truncated = false;             // stopped early on rank deficiency
  double last_time = 0.0;

  double coef(std::size_t k, std::size_t col) const { return cumcoef[k * p + col]; }
  double var(std::size_t k, std::size_t col) const { return pointwise_var[k * p + col]; }
};

inline AalenFit aalen_fit(const std::vector<SurvivalSample>& samples,
                          const CovariateSelector& sel = {}) {
  if (samples.empty()) throw estimation_error("aalen_fit: empty dataset");
  const std::size_t n = samples.size();
  const std::size_t p = 1 + sel.dim();

  std::vector<double> xi(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    xi[i * p] = 1.0;
    auto row = sel.row(samples[i]);
    for (std::size_t j = 0; j < row.size(); ++j) xi[i * p + 1 + j] = row[j];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].time < samples[b].time;
  });

  // running at-risk Gram matrix, subjects removed as time passes
  SymMatrix gram(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t l = 0; l <= j; ++l) {
        gram(j, l) += xi[i * p + j] * xi[i * p + l];
        gram(l, j) = gram(j, l);
      }

  AalenFit fit;
  fit.p = p;
  std::vector<double> b(p, 0.0), v(p, 0.0);

  std::size_t k = 0;
  std::size_t at_risk = n;
  bool any_increment = false;
  while (k < n) {
    double t = samples[order[k]].time;
    std::size_t k_end = k;
    std::vector<std::size_t> events;
    while (k_end < n && samples[order[k_end]].time == t) {
      if (samples[order[k_end]].status == 1) events.push_back(order[k_end]);
      ++k_end;
    }
    if (!events.empty()) {
      if (!spd_invertible(gram)) {
        if (!any_increment)
          throw estimation_error(
              "aalen_fit: design rank-deficient at the first event time");
        fit.truncated = true;
        break;
      }
      std::vector<double> rhs(p, 0.0);
      for (std::size_t i : events)
        for (std::size_t j = 0; j < p; ++j) rhs[j] += xi[i * p + j];
      auto db = solve_spd(gram, rhs, "aalen_fit");

      std::vector<double> dv(p, 0.0);
      for (std::size_t i : events) {
        std::vector<double> e(xi.begin() + static_cast<std::ptrdiff_t>(i * p),
                              xi.begin() + static_cast<std::ptrdiff_t>((i + 1) * p));
        auto gi = solve_spd(gram, e, "aalen_fit");
        for (std::size_t j = 0; j < p; ++j) dv[j] += gi[j] * gi[j];
      }

      SymMatrix ginv = invert_spd(gram, "aalen_fit");
      for (std::size_t j = 0; j < p; ++j) {
        b[j] += db[j];
        v[j] += dv[j];
        fit.leverage.push_back(ginv(j, j));
      }
      fit.times.push_back(t);
      fit.cumcoef.insert(fit.cumcoef.end(), b.begin(), b.end());
      fit.pointwise_var.insert(fit.pointwise_var.end(), v.begin(), v.end());
      fit.increment.insert(fit.increment.end(), db.begin(), db.end());
      fit.increment_var.insert(fit.increment_var.end(), dv.begin(), dv.end());
      fit.n_risk.push_back(static_cast<int>(at_risk));
      fit.n_events.push_back(static_cast<int>(events.size()));
      fit.last_time = t;
      any_increment = true;
    }
    // remove everyone leaving follow-up at t
    for (std::size_t i = k; i < k_end; ++i) {
      std::size_t r = order[i];
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t l = 0; l <= j; ++l) {
          gram(j, l) -= xi[r * p + j] * xi[r * p + l];
          gram(l, j) = gram(j, l);
        }
    }
    at_risk -= k_end - k;
    k = k_end;
  }
  if (fit.times.empty())
    throw estimation_error("aalen_fit: no events in the data");
  return fit;
}

/// Constant-effect summary for one column of an Aalen fit: the weighted
/// least-squares slope of the cumulative coefficient against time (weights
/// inverse increment variance), plus a resampling test of constancy based
/// on the largest deviation of B(t) from the fitted line.
struct ConstantEffect {
  double psi = 0.0;
  double se = 0.0;
  double max_deviation = 0.0;
  double p_value = 1.0;
  std::size_t n_increments = 0;
};

inline ConstantEffect constant_effect(
    const AalenFit& fit, std::size_t column, double window_lo = 0.0,
    double window_hi = std::numeric_limits<double>::infinity(),
    int n_resample = 1000, SeedSpec seed = {}) {
  if (column >= fit.p) throw input_error("constant_effect: column out of range");

  // Regress the cumulative coefficient B(t_k) on window time; regressing
  // single increments on their waiting times is inconsistent (the gap
  // randomness biases the slope), while the level regression has
  // sum_j c_j dt_j = 1 identically, so the gaps cancel. Weights come from
  // the cumulated risk-set variance proxy d_k [(X'X)^-1]_cc / n_k, which
  // does not look at which subjects produced the events.
  std::vector<double> dt, db, dv, tw, bw;
  double prev = window_lo, vpred_cum = 0.0;
  std::vector<double> weight;
  for (std::size_t k = 0; k < fit.times.size(); ++k) {
    double t = fit.times[k];
    if (t <= window_lo || t > window_hi) continue;
    double v = fit.increment_var[k * fit.p + column];
    if (!(v > 0.0)) continue;
    vpred_cum += fit.n_events[k] * fit.leverage[k * fit.p + column] /
                 static_cast<double>(fit.n_risk[k]);
    dt.push_back(t - prev);
    db.push_back(fit.increment[k * fit.p + column]);
    dv.push_back(v);
    tw.push_back(t - window_lo);
    bw.push_back((bw.empty() ? 0.0 : bw.back()) + db.back());
    weight.push_back(1.0 / vpred_cum);
    prev = t;
  }
  const std::size_t m = dt.size();
  if (m < 2)
    throw estimation_error(
        "constant_effect: estimation window shorter than two event times");

  double denom = 0.0;
  for (std::size_t k = 0; k < m; ++k) denom += weight[k] * tw[k] * tw[k];
  // psi_hat = sum_k a_k B(t_k) = sum_j c_j dB_j with c_j the suffix sums
  std::vector<double> c(m, 0.0);
  double suffix = 0.0;
  for (std::size_t k = m; k-- > 0;) {
    suffix += weight[k] * tw[k] / denom;
    c[k] = suffix;
  }
  ConstantEffect ce;
  double psi = 0.0, var = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    psi += c[j] * db[j];
    var += c[j] * c[j] * dv[j];
  }
  ce.psi = psi;
  ce.se = std::sqrt(var);
  ce.n_increments = m;

  auto max_dev = [&](const std::vector<double>& incr, double slope) {
    double cum = 0.0, dmax = 0.0;
    for (std::size_t k = 0; k < incr.size(); ++k) {
      cum += incr[k];
      dmax = std::max(dmax, std::fabs(cum - slope * tw[k]));
    }
    return dmax;
  };
  ce.max_deviation = max_dev(db, ce.psi);

  // parametric resampling of martingale increments under the fitted line
  RngStream rng(seed);
  int exceed = 0;
  std::vector<double> db_star(m);
  for (int r = 0; r < n_resample; ++r) {
    double psi_star = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      db_star[k] = ce.psi * dt[k] + rng.normal() * std::sqrt(dv[k]);
      psi_star += c[k] * db_star[k];
    }
    if (max_dev(db_star, psi_star) >= ce.max_deviation) ++exceed;
  }
  ce.p_value = (1.0 + exceed) / (1.0 + n_resample);
  return ce;
}

}  // namespace hazardlens
