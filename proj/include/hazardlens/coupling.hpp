#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hazardlens/errors.hpp"
#include "hazardlens/frailty.hpp"
#include "hazardlens/rng.hpp"
#include "hazardlens/stats_util.hpp"
#include "hazardlens/step_function.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

/// Shared-Gamma coupling: Z ~ Gamma(mean 1, var theta), V0, V1 ~ Exp(1)
/// independent, and
///   T0 = log1p((theta/Z) V0) / theta,
///   T1 = log1p((theta/Z) V1) / (theta e^beta).
/// Marginals are exponential (rates 1 and e^beta), T0 and T1 are
/// conditionally independent given Z, and Kendall's tau is theta/(theta+2).
/// theta = 0 degenerates to independent arms.
inline std::vector<PotentialOutcomePair> gen_gamma_shared(double beta,
                                                          double theta,
                                                          std::size_t n,
                                                          SeedSpec seed) {
  if (theta < 0.0) throw input_error("gen_gamma_shared: theta must be >= 0");
  std::vector<PotentialOutcomePair> out;
  out.reserve(n);
  RngStream rng(seed);
  const double ebeta = std::exp(beta);
  for (std::size_t i = 0; i < n; ++i) {
    double z = theta == 0.0 ? 1.0 : rng.gamma(1.0 / theta, theta);
    double v0 = rng.exponential();
    double v1 = rng.exponential();
    int a = rng.bernoulli(0.5) ? 1 : 0;
    double t0, t1;
    if (theta == 0.0) {
      t0 = v0;
      t1 = v1 / ebeta;
    } else {
      t0 = std::log1p(theta / z * v0) / theta;
      t1 = std::log1p(theta / z * v1) / (theta * ebeta);
    }
    out.push_back(make_pair_obs(t0, t1, z, a));
  }
  return out;
}

/// Shared-additive coupling: Z ~ Gamma(mean 1-alpha, var 1),
/// V0, V1 ~ Gamma(mean alpha, var 1), T0 = V0 + Z, T1 = e^{-beta} (V1 + Z).
/// Conditional independence holds, but the causal hazard ratio no longer
/// matches any fixed-frailty hazard ratio.
inline std::vector<PotentialOutcomePair> gen_shared_additive(double alpha,
                                                             double beta,
                                                             std::size_t n,
                                                             SeedSpec seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw input_error("gen_shared_additive: alpha must be in (0, 1)");
  std::vector<PotentialOutcomePair> out;
  out.reserve(n);
  RngStream rng(seed);
  const double scale_factor = std::exp(-beta);
  const double mz = 1.0 - alpha;
  for (std::size_t i = 0; i < n; ++i) {
    double z = rng.gamma(mz * mz, 1.0 / mz);
    double v0 = rng.gamma(alpha * alpha, 1.0 / alpha);
    double v1 = rng.gamma(alpha * alpha, 1.0 / alpha);
    int a = rng.bernoulli(0.5) ? 1 : 0;
    out.push_back(make_pair_obs(v0 + z, scale_factor * (v1 + z), z, a));
  }
  return out;
}

/// Two-level frailty coupling: Z1 ~ Gamma(1, 1); the middle layer
/// (integrating the inner frailty Z2 out) has cumulative hazard
/// Z1 (exp{L0(t) e^{beta a}} - 1), and the fully marginal model is
/// proportional hazards with coefficient beta. z2_variance parameterizes
/// the inner Gamma frailty; 1 is the reference construction, and 0
/// degenerates to the single-frailty generator.
inline std::vector<PotentialOutcomePair> gen_two_level(
    double beta, const CumulativeHazard& lambda0, std::size_t n, SeedSpec seed,
    double z2_variance = 1.0) {
  if (z2_variance < 0.0)
    throw input_error("gen_two_level: z2_variance must be >= 0");
  std::vector<PotentialOutcomePair> out;
  out.reserve(n);
  RngStream rng(seed);
  const bool degenerate = z2_variance == 0.0;
  FrailtySpec inner = FrailtySpec::gamma(degenerate ? 1.0 : z2_variance);
  for (std::size_t i = 0; i < n; ++i) {
    double z1 = rng.gamma(1.0, 1.0);
    double z2 = degenerate ? 1.0 : rng.gamma(1.0 / z2_variance, z2_variance);
    int a = rng.bernoulli(0.5) ? 1 : 0;
    auto draw = [&](int arm) {
      double e = rng.exponential();
      double q = degenerate ? e : inner.neg_log_laplace(e / z2);
      return lambda0.invert(std::exp(-beta * arm) * std::log1p(q / z1));
    };
    double t0 = draw(0);
    double t1 = draw(1);
    auto p = make_pair_obs(t0, t1, z1, a);
    p.z2 = z2;
    out.push_back(p);
  }
  return out;
}

/// Additive-hazards coupling: given frailty z, the control arm has hazard
/// omega(t, z) and the treated arm psi(t) + omega(t, z), conditionally
/// independent. omega is supplied as a step-function factory per z.
struct AdditiveHazardSpec {
  StepFunction psi;
  std::function<StepFunction(double z)> omega;
  FrailtySpec frailty = FrailtySpec::gamma(1.0);
};

inline std::vector<PotentialOutcomePair> gen_additive(
    const AdditiveHazardSpec& spec, std::size_t n, SeedSpec seed) {
  std::vector<PotentialOutcomePair> out;
  out.reserve(n);
  RngStream rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    double z = spec.frailty.sample(rng);
    StepFunction h0 = spec.omega(z);
    StepFunction h1 = spec.psi + h0;
    for (const StepFunction* h : {&h0, &h1}) {
      if (h->min_value() < 0.0) {
        double bad_t = 0.0;
        const auto& vals = h->values();
        for (std::size_t k = 0; k < vals.size(); ++k)
          if (vals[k] < 0.0) {
            bad_t = k == 0 ? 0.0 : h->jump_times()[k - 1];
            break;
          }
        throw estimation_error("gen_additive: negative total hazard at t = " +
                               std::to_string(bad_t) + ", z = " +
                               std::to_string(z));
      }
    }
    int a = rng.bernoulli(0.5) ? 1 : 0;
    double t0 = h0.invert_integral(rng.exponential());
    double t1 = h1.invert_integral(rng.exponential());
    out.push_back(make_pair_obs(t0, t1, z, a));
  }
  return out;
}

/// Observed-data view of a coupled sample: (T, A) with everyone an event.
inline std::vector<SurvivalSample> observed_data(
    const std::vector<PotentialOutcomePair>& pairs) {
  std::vector<SurvivalSample> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    SurvivalSample s;
    s.id = std::to_string(i + 1);
    s.time = pairs[i].t_obs;
    s.status = 1;
    s.arm = pairs[i].a;
    out.push_back(std::move(s));
  }
  return out;
}

/// Empirical check that proportional-hazards data always shows frailty-type
/// selection: with Lambda0(T) = e^{-A beta} V and V ~ Exp(1),
/// E(V | T > t, A = a) = 1 + e^{a beta} Lambda0(t).
struct SelectionCheckRow {
  double t = 0.0;
  int arm = 0;
  double analytic = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

inline std::vector<SelectionCheckRow> cox_selection_check(
    double beta, const CumulativeHazard& lambda0, std::size_t n, SeedSpec seed,
    const std::vector<double>& tgrid) {
  if (n < 1000) throw input_error("cox_selection_check: n must be >= 1000");
  RngStream rng(seed);
  std::vector<double> v(n), t(n);
  std::vector<int> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.bernoulli(0.5) ? 1 : 0;
    v[i] = rng.exponential();
    t[i] = lambda0.invert(std::exp(-a[i] * beta) * v[i]);
  }
  std::vector<SelectionCheckRow> rows;
  for (double tg : tgrid) {
    for (int arm = 0; arm <= 1; ++arm) {
      SelectionCheckRow r;
      r.t = tg;
      r.arm = arm;
      r.analytic = 1.0 + std::exp(arm * beta) * lambda0(tg);
      std::vector<double> sel;
      for (std::size_t i = 0; i < n; ++i)
        if (a[i] == arm && t[i] > tg) sel.push_back(v[i]);
      r.count = sel.size();
      if (!sel.empty()) {
        r.empirical = mean_of(sel);
        r.se = sd_of(sel) / std::sqrt(static_cast<double>(sel.size()));
      }
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace hazardlens
