#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hazardlens/cox.hpp"
#include "hazardlens/errors.hpp"
#include "hazardlens/rng.hpp"
#include "hazardlens/stats_util.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

/// A curve with pointwise and uniform confidence bands. Grid points where
/// the estimate is undefined (before the first event) carry NaN throughout.
struct BandedCurve {
  std::vector<double> times;
  std::vector<double> estimate;
  std::vector<double> lo, hi;            // pointwise
  std::vector<double> lo_unif, hi_unif;  // simultaneous
  double level = 0.95;
  int n_boot_used = 0;
};

/// RR(t) = (1 - exp(-L0 e^beta)) / (1 - exp(-L0)): the plug-in relative
/// risk of failure by t, treated vs control. Undefined (NaN) at L0 = 0.
inline double rr_value(double cumhaz0, double beta) {
  if (!(cumhaz0 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return -std::expm1(-cumhaz0 * std::exp(beta)) / -std::expm1(-cumhaz0);
}

/// Relative-risk curve from an arm-only Cox fit, with pointwise and
/// sup-statistic-calibrated uniform bands from a nonparametric bootstrap of
/// subjects. Bootstrap replicates use per-replicate random streams, so the
/// result is reproducible regardless of evaluation order.
inline BandedCurve rr_curve(const std::vector<SurvivalSample>& data,
                            const CoxFit& fit, const std::vector<double>& tgrid,
                            double level = 0.95, int n_boot = 1000,
                            SeedSpec seed = {}) {
  if (fit.beta.size() != 1)
    throw input_error("rr_curve: requires an arm-only Cox fit");
  if (n_boot < 200) throw input_error("rr_curve: n_boot must be >= 200");

  BandedCurve out;
  out.times = tgrid;
  out.level = level;
  const std::size_t g = tgrid.size();
  out.estimate.resize(g);
  for (std::size_t k = 0; k < g; ++k)
    out.estimate[k] = rr_value(fit.baseline_cumhaz(tgrid[k]), fit.beta[0]);

  const std::size_t n = data.size();
  std::vector<std::vector<double>> boot(g);  // per grid point
  CovariateSelector arm_only;
  for (int b = 0; b < n_boot; ++b) {
    RngStream rng(seed.substream(static_cast<std::uint64_t>(b)));
    std::vector<SurvivalSample> resampled;
    resampled.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      resampled.push_back(data[rng.below(n)]);
    try {
      CoxFit rf = cox_fit(resampled, arm_only);
      for (std::size_t k = 0; k < g; ++k) {
        double v = rr_value(rf.baseline_cumhaz(tgrid[k]), rf.beta[0]);
        if (std::isfinite(v)) boot[k].push_back(v);
      }
      ++out.n_boot_used;
    } catch (const estimation_error&) {
      // degenerate resample; skip
    }
  }

  std::vector<double> sigma(g, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < g; ++k)
    if (std::isfinite(out.estimate[k]) && boot[k].size() >= 2)
      sigma[k] = sd_of(boot[k]);

  // sup of standardized deviations across the grid, per replicate
  std::vector<double> sup_stats;
  for (int b = 0; b < out.n_boot_used; ++b) {
    double sup = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < g; ++k) {
      if (!std::isfinite(sigma[k]) || sigma[k] <= 0.0) continue;
      if (static_cast<std::size_t>(b) >= boot[k].size()) continue;
      sup = std::max(sup, std::fabs(boot[k][static_cast<std::size_t>(b)] -
                                    out.estimate[k]) / sigma[k]);
      any = true;
    }
    if (any) sup_stats.push_back(sup);
  }

  double z = normal_quantile(0.5 + level / 2.0);
  double c = sup_stats.empty() ? z : std::max(z, sample_quantile(sup_stats, level));

  auto nan = std::numeric_limits<double>::quiet_NaN();
  out.lo.assign(g, nan);
  out.hi.assign(g, nan);
  out.lo_unif.assign(g, nan);
  out.hi_unif.assign(g, nan);
  for (std::size_t k = 0; k < g; ++k) {
    if (!std::isfinite(out.estimate[k]) || !std::isfinite(sigma[k])) continue;
    out.lo[k] = std::max(0.0, out.estimate[k] - z * sigma[k]);
    out.hi[k] = out.estimate[k] + z * sigma[k];
    out.lo_unif[k] = std::max(0.0, out.estimate[k] - c * sigma[k]);
    out.hi_unif[k] = out.estimate[k] + c * sigma[k];
  }
  return out;
}

}  // namespace hazardlens
