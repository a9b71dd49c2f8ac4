#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hazardlens/rng.hpp"
#include "hazardlens/step_function.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

/// A frailty distribution exposing its Laplace transform phi(u) = E exp(-Zu)
/// and the derived quantities used throughout: the inverse transform, the
/// posterior mean of Z among survivors, and sampling.
///
/// Two variants: Gamma with mean 1 and variance theta, and a finite discrete
/// mixture with atoms (z_i, p_i), z_i > 0, sum p_i = 1.
class FrailtySpec {
 public:
  static FrailtySpec gamma(double theta) {
    if (!(theta > 0.0))
      throw std::invalid_argument("FrailtySpec: theta must be positive");
    FrailtySpec f;
    f.theta_ = theta;
    return f;
  }

  static FrailtySpec discrete(std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty())
      throw std::invalid_argument("FrailtySpec: need at least one atom");
    double total = 0.0;
    for (auto& [z, p] : atoms) {
      if (!(z > 0.0) || !(p > 0.0))
        throw std::invalid_argument("FrailtySpec: atoms need z > 0, p > 0");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9)
      throw std::invalid_argument("FrailtySpec: atom probabilities must sum to 1");
    FrailtySpec f;
    f.atoms_ = std::move(atoms);
    return f;
  }

  bool is_gamma() const { return atoms_.empty(); }
  double theta() const { return theta_; }
  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

  double mean() const {
    if (is_gamma()) return 1.0;
    double m = 0.0;
    for (auto& [z, p] : atoms_) m += z * p;
    return m;
  }

  /// phi(u) = E exp(-Zu). Gamma: (1 + theta*u)^(-1/theta), evaluated in a
  /// form stable for small theta.
  double laplace(double u) const {
    if (u < 0.0) throw std::domain_error("laplace: u must be >= 0");
    if (is_gamma()) return std::exp(-std::log1p(theta_ * u) / theta_);
    double s = 0.0;
    for (auto& [z, p] : atoms_) s += p * std::exp(-z * u);
    return s;
  }

  /// (d/du) log phi(u); strictly negative. Its negation is the posterior
  /// mean E(Z | survival weight exp(-Zu)).
  double dlog_laplace(double u) const {
    if (u < 0.0) throw std::domain_error("dlog_laplace: u must be >= 0");
    if (is_gamma()) return -1.0 / (1.0 + theta_ * u);
    double num = 0.0, den = 0.0;
    for (auto& [z, p] : atoms_) {
      double w = p * std::exp(-z * u);
      num += z * w;
      den += w;
    }
    return -num / den;
  }

  double posterior_mean(double u) const { return -dlog_laplace(u); }

  /// Var(Z | survival weight exp(-Zu)) = phi''(u)/phi(u) - (phi'/phi)^2.
  double posterior_variance(double u) const {
    if (u < 0.0) throw std::domain_error("posterior_variance: u must be >= 0");
    if (is_gamma()) {
      double d = 1.0 + theta_ * u;
      return theta_ / (d * d);
    }
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (auto& [z, p] : atoms_) {
      double w = p * std::exp(-z * u);
      m0 += w;
      m1 += z * w;
      m2 += z * z * w;
    }
    double mean = m1 / m0;
    return m2 / m0 - mean * mean;
  }

  /// -log phi(u), computed without underflow (log-sum-exp for mixtures).
  double neg_log_laplace(double u) const {
    if (u < 0.0) throw std::domain_error("neg_log_laplace: u must be >= 0");
    if (is_gamma()) return std::log1p(theta_ * u) / theta_;
    double z_min = atoms_.front().first;
    for (auto& [z, p] : atoms_) z_min = std::min(z_min, z);
    double s = 0.0;
    for (auto& [z, p] : atoms_) s += p * std::exp(-(z - z_min) * u);
    return z_min * u - std::log(s);
  }

  /// The unique u >= 0 with phi(u) = s, for s in (0, 1]. Gamma is closed
  /// form; the discrete case uses safeguarded Newton to |phi(u)-s| < 1e-12.
  double inv_laplace(double s) const {
    if (!(s > 0.0) || s > 1.0)
      throw std::domain_error("inv_laplace: s must be in (0, 1]");
    if (s == 1.0) return 0.0;
    if (is_gamma()) return std::expm1(-theta_ * std::log(s)) / theta_;

    double lo = 0.0, hi = 1.0;
    while (laplace(hi) > s) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      double f = laplace(u) - s;
      if (std::fabs(f) < 1e-12) break;
      if (f > 0.0)
        lo = u;  // phi decreasing: phi(u) > s means root is to the right
      else
        hi = u;
      double deriv = laplace(u) * dlog_laplace(u);
      double step = u - f / deriv;
      u = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    }
    return u;
  }

  double sample(RngStream& rng) const {
    if (is_gamma()) return rng.gamma(1.0 / theta_, theta_);
    double u = rng.uniform01();
    double acc = 0.0;
    for (auto& [z, p] : atoms_) {
      acc += p;
      if (u < acc) return z;
    }
    return atoms_.back().first;
  }

 private:
  FrailtySpec() = default;
  double theta_ = 0.0;
  std::vector<std::pair<double, double>> atoms_;
};

/// The marginal model: hazard ratio exp(beta1) up to the change point nu and
/// exp(beta2) after it, on top of a baseline cumulative hazard. nu = +inf
/// reduces to the plain proportional-hazards model.
struct MarginalModel {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double nu = std::numeric_limits<double>::infinity();
  CumulativeHazard baseline = CumulativeHazard::constant_rate(1.0);

  double baseline_cumhaz(double t) const { return baseline(t); }

  /// Lambda(t; a) of the marginal model.
  double cumhaz(double t, int arm) const {
    if (arm == 0) return baseline(t);
    if (t <= nu || !std::isfinite(nu)) return baseline(t) * std::exp(beta1);
    double l_nu = baseline(nu);
    return l_nu * std::exp(beta1) + (baseline(t) - l_nu) * std::exp(beta2);
  }

  double survival(double t, int arm) const { return std::exp(-cumhaz(t, arm)); }

  /// The marginal hazard ratio at t (right-continuous at nu).
  double hazard_ratio(double t) const {
    return std::exp(t <= nu ? beta1 : beta2);
  }

  /// Inverts Lambda(.; arm) at w > 0; +inf when the hazard is exhausted.
  double invert_cumhaz(double w, int arm) const {
    if (arm == 0) return baseline.invert(w);
    double l_nu_1 = std::isfinite(nu)
                        ? baseline(nu) * std::exp(beta1)
                        : std::numeric_limits<double>::infinity();
    if (w <= l_nu_1) return baseline.invert(w * std::exp(-beta1));
    return baseline.invert(baseline(nu) + (w - l_nu_1) * std::exp(-beta2));
  }
};

/// Lambda*(t; a) = phi^{-1}(exp(-Lambda(t; a))): the conditional cumulative
/// hazard scale such that T given (A = a, Z = z) has cumulative hazard
/// z * Lambda*(t; a) while the marginal model stays exactly as specified.
inline double conditional_cumhaz(const MarginalModel& m, const FrailtySpec& f,
                                 int arm, double t) {
  double lam = m.cumhaz(t, arm);
  if (lam == 0.0) return 0.0;
  if (f.is_gamma()) return std::expm1(f.theta() * lam) / f.theta();
  return f.inv_laplace(std::exp(-lam));
}

/// g_Z(u) = |D log phi|(phi^{-1}(u)) on (0, 1); increasing in u. Equals the
/// posterior frailty mean among survivors with marginal survival u, which is
/// what makes it the exact conversion factor between marginal and
/// conditional hazard ratios.
inline double g_frailty(const FrailtySpec& f, double u) {
  return f.posterior_mean(f.inv_laplace(u));
}

/// Conditional (fixed-frailty) hazard ratio at t, via the general route
/// HR_Z(t) = mHR(t) * g_Z(S(t;0)) / g_Z(S(t;1)). Valid for any frailty law.
inline double hrz_general(const MarginalModel& m, const FrailtySpec& f,
                          double t) {
  if (t == 0.0) return std::exp(m.beta1);
  double g0 = g_frailty(f, m.survival(t, 0));
  double g1 = g_frailty(f, m.survival(t, 1));
  return m.hazard_ratio(t) * g0 / g1;
}

/// Gamma-frailty closed form of HR_Z(t):
///   exp(b1) * exp[theta*L0(t)*(exp(b1)-1)]                     for t <= nu
///   exp(b2) * exp[theta*L0(nu)*(exp(b1)-1)
///                 + theta*(L0(t)-L0(nu))*(exp(b2)-1)]          for t > nu.
inline double hrz_gamma_closed(const MarginalModel& m, double theta, double t) {
  double e1 = std::exp(m.beta1);
  if (t <= m.nu || !std::isfinite(m.nu))
    return e1 * std::exp(theta * m.baseline_cumhaz(t) * (e1 - 1.0));
  double e2 = std::exp(m.beta2);
  double l_nu = m.baseline_cumhaz(m.nu);
  double l_tail = m.baseline_cumhaz(t) - l_nu;
  return e2 * std::exp(theta * l_nu * (e1 - 1.0) + theta * l_tail * (e2 - 1.0));
}

/// HR_Z(t) on a grid; Gamma uses the closed form, discrete mixtures the
/// general g_Z route (the two agree for Gamma, which the verify suite
/// cross-checks).
inline std::vector<double> hrz_curve(const MarginalModel& m,
                                     const FrailtySpec& f,
                                     const std::vector<double>& tgrid) {
  std::vector<double> out;
  out.reserve(tgrid.size());
  for (double t : tgrid)
    out.push_back(f.is_gamma() ? hrz_gamma_closed(m, f.theta(), t)
                               : hrz_general(m, f, t));
  return out;
}

/// E(Z | T > t, A = a): the posterior frailty mean among survivors of arm a.
inline double selection_mean(const MarginalModel& m, const FrailtySpec& f,
                             int arm, double t) {
  return f.posterior_mean(conditional_cumhaz(m, f, arm, t));
}

struct SelectionCurve {
  std::vector<double> t;
  std::vector<double> mean_control;  // E(Z | T>t, A=0)
  std::vector<double> mean_treated;  // E(Z | T>t, A=1)
  std::vector<double> ratio;         // treated / control
};

inline SelectionCurve selection_curve(const MarginalModel& m,
                                      const FrailtySpec& f,
                                      const std::vector<double>& tgrid) {
  SelectionCurve c;
  c.t = tgrid;
  for (double t : tgrid) {
    double e0 = selection_mean(m, f, 0, t);
    double e1 = selection_mean(m, f, 1, t);
    c.mean_control.push_back(e0);
    c.mean_treated.push_back(e1);
    c.ratio.push_back(e1 / e0);
  }
  return c;
}

/// One draw from the frailty data-generating process: Z ~ f, A ~ Bern(1/2),
/// then T from the conditional cumulative hazard z * Lambda*(t; A), which
/// reproduces the marginal change-point model exactly by construction.
struct FrailtyDraw {
  double z = 1.0;
  int arm = 0;
  double time = 0.0;
};

inline double draw_event_time(const MarginalModel& m, const FrailtySpec& f,
                              double z, int arm, RngStream& rng) {
  double u = rng.exponential() / z;  // target on the Lambda* scale
  return m.invert_cumhaz(f.neg_log_laplace(u), arm);
}

inline FrailtyDraw draw_conditional(const MarginalModel& m, const FrailtySpec& f,
                                    RngStream& rng) {
  FrailtyDraw d;
  d.z = f.sample(rng);
  d.arm = rng.bernoulli(0.5) ? 1 : 0;
  d.time = draw_event_time(m, f, d.z, d.arm, rng);
  return d;
}

/// Potential-outcome version: T0 and T1 drawn independently given Z, so the
/// conditional-independence coupling holds and the observed arm obeys
/// consistency.
inline PotentialOutcomePair draw_conditional_pair(const MarginalModel& m,
                                                  const FrailtySpec& f,
                                                  RngStream& rng) {
  double z = f.sample(rng);
  int a = rng.bernoulli(0.5) ? 1 : 0;
  double t0 = draw_event_time(m, f, z, 0, rng);
  double t1 = draw_event_time(m, f, z, 1, rng);
  return make_pair_obs(t0, t1, z, a);
}

}  // namespace hazardlens
