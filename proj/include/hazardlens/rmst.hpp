#pragma once

#include <cmath>
#include <vector>

#include "hazardlens/errors.hpp"
#include "hazardlens/kaplan_meier.hpp"
#include "hazardlens/stats_util.hpp"

namespace hazardlens {

/// Restricted mean survival time up to a horizon: the exact area under the
/// step survival curve, its complement (restricted mean time lost), and the
/// usual counting-process variance.
struct RmstResult {
  double rmst = 0.0;
  double rmtl = 0.0;
  double variance = 0.0;
  double horizon = 0.0;
};

inline RmstResult rmst(const KmCurve& km, double horizon) {
  if (!(horizon > 0.0)) throw input_error("rmst: horizon must be > 0");
  if (horizon > km.max_followup)
    throw estimation_error("rmst: horizon beyond the curve's support");

  RmstResult r;
  r.horizon = horizon;
  r.rmst = km.survival.integral(horizon);
  r.rmtl = horizon - r.rmst;

  // Var = sum over event times t_i <= horizon of
  //       [area of S on (t_i, horizon]]^2 * d_i / (n_i (n_i - d_i))
  for (std::size_t k = 0; k < km.event_times.size(); ++k) {
    double t = km.event_times[k];
    if (t > horizon) break;
    int ni = km.n_risk[k], di = km.n_event[k];
    if (ni <= di) continue;  // survival hit zero; remaining area is zero
    double tail_area = r.rmst - km.survival.integral(t);
    r.variance += tail_area * tail_area * static_cast<double>(di) /
                  (static_cast<double>(ni) * (ni - di));
  }
  return r;
}

/// Ratio of restricted mean time lost (treated vs control) with a
/// delta-method confidence interval on the log scale.
struct RmtlRatio {
  double rmtl_treated = 0.0;
  double rmtl_control = 0.0;
  double ratio = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
};

inline RmtlRatio rmtl_ratio(const KmCurve& treated, const KmCurve& control,
                            double horizon, double level = 0.95) {
  auto r1 = rmst(treated, horizon);
  auto r0 = rmst(control, horizon);
  if (!(r1.rmtl > 0.0) || !(r0.rmtl > 0.0))
    throw estimation_error("rmtl_ratio: zero time lost in one arm");
  RmtlRatio out;
  out.rmtl_treated = r1.rmtl;
  out.rmtl_control = r0.rmtl;
  out.ratio = r1.rmtl / r0.rmtl;
  out.level = level;
  double se_log = std::sqrt(r1.variance / (r1.rmtl * r1.rmtl) +
                            r0.variance / (r0.rmtl * r0.rmtl));
  double z = normal_quantile(0.5 + level / 2.0);
  out.lo = out.ratio * std::exp(-z * se_log);
  out.hi = out.ratio * std::exp(z * se_log);
  return out;
}

}  // namespace hazardlens
