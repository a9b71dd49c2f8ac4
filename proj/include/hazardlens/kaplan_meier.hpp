#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "hazardlens/errors.hpp"
#include "hazardlens/step_function.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

/// Product-limit survival estimate with Greenwood variance attached at each
/// jump. greenwood_sum[k] is the running sum d/(n(n-d)) up to event time k,
/// which both the variance and the restricted-mean variance build on.
struct KmCurve {
  StepFunction survival;               // jumps at event times only
  std::vector<double> event_times;
  std::vector<double> surv_at_event;   // S(t_k)
  std::vector<double> variance;        // Greenwood Var{S(t_k)}
  std::vector<double> greenwood_sum;   // sum d/(n(n-d)) through t_k
  std::vector<int> n_risk;
  std::vector<int> n_event;
  double max_followup = 0.0;
  std::size_t n = 0;
};

namespace detail {

struct TimeAgg {
  double t;
  int d;  // events
  int c;  // censorings
};

inline std::vector<TimeAgg> aggregate_times(const std::vector<SurvivalSample>& data) {
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return data[a].time < data[b].time;
  });
  std::vector<TimeAgg> aggs;
  for (std::size_t k = 0; k < idx.size();) {
    double t = data[idx[k]].time;
    int d = 0, c = 0;
    while (k < idx.size() && data[idx[k]].time == t) {
      if (data[idx[k]].status == 1)
        ++d;
      else
        ++c;
      ++k;
    }
    aggs.push_back({t, d, c});
  }
  return aggs;
}

}  // namespace detail

/// Kaplan-Meier estimate, optionally restricted to one arm. All-censored
/// data yields S identically 1 with zero variance; an empty selection is an
/// error.
inline KmCurve kaplan_meier(const std::vector<SurvivalSample>& data,
                            std::optional<int> arm = std::nullopt) {
  std::vector<SurvivalSample> sel;
  for (const auto& s : data)
    if (!arm || s.arm == *arm) sel.push_back(s);
  if (sel.empty()) throw estimation_error("kaplan_meier: empty selection");

  auto aggs = detail::aggregate_times(sel);
  KmCurve km;
  km.n = sel.size();
  km.max_followup = aggs.back().t;

  double s = 1.0, gw = 0.0;
  int at_risk = static_cast<int>(sel.size());
  std::vector<double> jumps, values{1.0};
  for (const auto& a : aggs) {
    if (a.d > 0) {
      s *= 1.0 - static_cast<double>(a.d) / at_risk;
      if (at_risk > a.d)
        gw += static_cast<double>(a.d) /
              (static_cast<double>(at_risk) * (at_risk - a.d));
      km.event_times.push_back(a.t);
      km.surv_at_event.push_back(s);
      km.variance.push_back(s > 0.0 ? s * s * gw : 0.0);
      km.greenwood_sum.push_back(gw);
      km.n_risk.push_back(at_risk);
      km.n_event.push_back(a.d);
      jumps.push_back(a.t);
      values.push_back(s);
    }
    at_risk -= a.d + a.c;
  }
  km.survival = StepFunction(std::move(jumps), std::move(values));
  return km;
}

/// Nelson-Aalen cumulative hazard estimate (step cumulative, starts at 0).
inline StepFunction nelson_aalen(const std::vector<SurvivalSample>& data,
                                 std::optional<int> arm = std::nullopt) {
  std::vector<SurvivalSample> sel;
  for (const auto& s : data)
    if (!arm || s.arm == *arm) sel.push_back(s);
  if (sel.empty()) throw estimation_error("nelson_aalen: empty selection");

  auto aggs = detail::aggregate_times(sel);
  int at_risk = static_cast<int>(sel.size());
  double cum = 0.0;
  std::vector<double> jumps, values{0.0};
  for (const auto& a : aggs) {
    if (a.d > 0) {
      cum += static_cast<double>(a.d) / at_risk;
      jumps.push_back(a.t);
      values.push_back(cum);
    }
    at_risk -= a.d + a.c;
  }
  return StepFunction(std::move(jumps), std::move(values));
}

}  // namespace hazardlens
