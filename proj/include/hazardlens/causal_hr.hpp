#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hazardlens/cox.hpp"
#include "hazardlens/errors.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

/// Closed-form causal hazard ratio of the shared-Gamma coupling:
/// HR(t) = e^beta exp{theta * L0(t) * (e^beta - 1)}, where L0 is the
/// control-arm baseline cumulative hazard (t itself for the unit-rate
/// construction). HR(0) = e^beta exactly, for every theta.
inline double causal_hr_closed(double beta, double theta, double cumhaz0) {
  if (theta < 0.0) throw input_error("causal_hr_closed: theta must be >= 0");
  double eb = std::exp(beta);
  return eb * std::exp(theta * cumhaz0 * (eb - 1.0));
}

/// The same curve with a fitted Cox model's Breslow baseline plugged in;
/// the sensitivity display for a chosen coupling strength.
inline std::vector<double> causal_hr_curve_from_fit(
    const CoxFit& fit, double theta, const std::vector<double>& tgrid) {
  if (fit.beta.size() != 1)
    throw input_error("causal_hr_curve_from_fit: requires an arm-only fit");
  std::vector<double> out;
  out.reserve(tgrid.size());
  for (double t : tgrid)
    out.push_back(causal_hr_closed(fit.beta[0], theta, fit.baseline_cumhaz(t)));
  return out;
}

/// Monte-Carlo estimate of the principal-stratum hazard ratio at t: within
/// the stratum {T0 >= t, T1 >= t}, each arm's hazard is estimated by the
/// binned estimator (#events in [t, t+h)) / (h * #at-risk). Points with a
/// thin stratum or no events are flagged rather than erroring.
struct McHrPoint {
  double t = 0.0;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_stratum = 0;
  std::size_t events_treated = 0;
  std::size_t events_control = 0;
  bool defined = false;
};

inline std::vector<McHrPoint> causal_hr_mc(
    const std::vector<PotentialOutcomePair>& pairs,
    const std::vector<double>& tgrid, double bandwidth,
    std::size_t min_stratum = 200) {
  if (!(bandwidth > 0.0)) throw input_error("causal_hr_mc: bandwidth must be > 0");
  std::vector<McHrPoint> out;
  out.reserve(tgrid.size());
  for (double t : tgrid) {
    McHrPoint pt;
    pt.t = t;
    const double hi = t + bandwidth;
    std::size_t n_str = 0, d1 = 0, d0 = 0;
    for (const auto& p : pairs) {
      bool in0 = p.t0 >= t, in1 = p.t1 >= t;
      if (in0 && in1) ++n_str;
      if (in0 && in1 && p.t1 < hi) ++d1;
      if (in0 && in1 && p.t0 < hi) ++d0;
    }
    pt.n_stratum = n_str;
    pt.events_treated = d1;
    pt.events_control = d0;
    if (n_str >= min_stratum && d1 > 0 && d0 > 0) {
      pt.estimate = static_cast<double>(d1) / static_cast<double>(d0);
      pt.se = pt.estimate * std::sqrt(1.0 / static_cast<double>(d1) +
                                      1.0 / static_cast<double>(d0));
      pt.defined = true;
    }
    out.push_back(pt);
  }
  return out;
}

/// Default bandwidth: the smallest h such that the crudest bin on the grid
/// still expects at least `target_events` events per arm.
inline double auto_bandwidth(const std::vector<PotentialOutcomePair>& pairs,
                             const std::vector<double>& tgrid,
                             double target_events = 50.0) {
  if (pairs.empty() || tgrid.empty())
    throw input_error("auto_bandwidth: empty input");
  double t_max = *std::max_element(tgrid.begin(), tgrid.end());
  std::size_t n_min = 0;
  double sum_t = 0.0;
  for (const auto& p : pairs) {
    if (p.t0 >= t_max && p.t1 >= t_max) ++n_min;
    sum_t += std::min(p.t0, p.t1);
  }
  double crude_rate = pairs.size() / std::max(sum_t, 1e-12);
  double denom = std::max<double>(n_min, 1) * crude_rate;
  return std::max(1e-3, target_events / denom);
}

}  // namespace hazardlens
