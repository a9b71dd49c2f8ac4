#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "hazardlens/causal_hr.hpp"
#include "hazardlens/coupling.hpp"
#include "hazardlens/cox.hpp"
#include "hazardlens/frailty.hpp"
#include "hazardlens/hazard_difference.hpp"
#include "hazardlens/kendall.hpp"
#include "hazardlens/sensitivity.hpp"
#include "hazardlens/stats_util.hpp"

namespace hazardlens {

/// Built-in oracle cross-checks: each check compares an implementation
/// route against an independent one (closed form vs root-finder, closed
/// form vs Monte Carlo, analytic conditional means vs empirical ones).
struct VerifyOptions {
  double tol_scale = 1.0;   // multiplies every tolerance; 0 is a negative control
  std::string only;         // substring filter on check names
  std::uint64_t seed = 20250811;
};

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string fmt_dev(double dev, double tol) {
  std::ostringstream os;
  os << "max deviation " << dev << " (tolerance " << tol << ")";
  return os.str();
}

/// Adaptive Simpson integration of E exp(-Z u) over a Gamma(mean 1,
/// var theta) density, as an independent quadrature route.
inline double gamma_laplace_quadrature(double theta, double u) {
  double shape = 1.0 / theta, scale = theta;
  auto dens = [&](double z) {
    return std::exp((shape - 1.0) * std::log(z) - z / scale -
                    std::lgamma(shape) - shape * std::log(scale));
  };
  auto f = [&](double z) { return std::exp(-z * u) * dens(z); };
  double hi = scale * (shape + 40.0 * std::sqrt(shape));  // far tail
  const int n = 40000;  // even
  double h = hi / n;
  double s = f(1e-300) + f(hi);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace detail

inline std::vector<VerifyCheck> run_verify(const VerifyOptions& opt = {}) {
  std::vector<VerifyCheck> checks;
  auto want = [&](const std::string& name) {
    return opt.only.empty() || name.find(opt.only) != std::string::npos;
  };
  auto add = [&](const std::string& name, double dev, double tol,
                 const std::string& extra = "") {
    VerifyCheck c;
    c.name = name;
    c.pass = dev <= tol * opt.tol_scale;
    c.detail = detail::fmt_dev(dev, tol * opt.tol_scale);
    if (!extra.empty()) c.detail += "; " + extra;
    checks.push_back(c);
  };

  const FrailtySpec gam = FrailtySpec::gamma(1.0);
  const FrailtySpec gam_half = FrailtySpec::gamma(0.5);
  const FrailtySpec disc =
      FrailtySpec::discrete({{0.2, 0.2}, {1.2, 0.8}});

  if (want("laplace")) {
    double dev = 0.0;
    for (const auto& f : {gam, gam_half, disc})
      for (int k = 1; k <= 99; ++k) {
        double s = k / 100.0;
        dev = std::max(dev, std::fabs(f.laplace(f.inv_laplace(s)) - s));
      }
    add("laplace-roundtrip", dev, 1e-10);
  }

  if (want("hrz")) {
    // Gamma closed form against the general g_Z route
    MarginalModel m{-std::log(2.0), 0.0, 4.0, CumulativeHazard::constant_rate(0.4)};
    double dev = 0.0;
    for (int k = 1; k <= 100; ++k) {
      double t = 8.0 * k / 100.0;
      for (double theta : {0.3, 1.0, 2.5}) {
        FrailtySpec f = FrailtySpec::gamma(theta);
        dev = std::max(dev, std::fabs(hrz_gamma_closed(m, theta, t) -
                                      hrz_general(m, f, t)));
      }
    }
    add("hrz-route-consistency", dev, 1e-9);
  }

  if (want("marginalization")) {
    // E_Z exp(-Z Lambda*) recovers exp(-Lambda): quadrature for Gamma,
    // exact atom sums for the mixture
    MarginalModel m{-std::log(2.0), 0.0, 4.0, CumulativeHazard::constant_rate(0.4)};
    double dev = 0.0;
    for (double t : {0.5, 2.0, 4.0, 6.0}) {
      for (int arm = 0; arm <= 1; ++arm) {
        double target = std::exp(-m.cumhaz(t, arm));
        double lstar_g = conditional_cumhaz(m, gam, arm, t);
        dev = std::max(dev, std::fabs(detail::gamma_laplace_quadrature(1.0, lstar_g) -
                                      target));
        double lstar_d = conditional_cumhaz(m, disc, arm, t);
        double sum = 0.0;
        for (auto& [z, p] : disc.atoms()) sum += p * std::exp(-z * lstar_d);
        dev = std::max(dev, std::fabs(sum - target));
      }
    }
    add("marginalization-identity", dev, 1e-10);
  }

  if (want("kendall")) {
    auto pairs = gen_gamma_shared(std::log(0.5), 0.5, 100000, {opt.seed, 11});
    double tau = kendall_tau(pairs);
    add("kendall-tau-mapping", std::fabs(tau - 0.2), 0.02);
  }

  if (want("cox-recovery")) {
    MarginalModel m{-std::log(2.0), 0.0,
                    std::numeric_limits<double>::infinity(),
                    CumulativeHazard::constant_rate(0.4)};
    RngStream rng({opt.seed, 21});
    std::vector<SurvivalSample> data;
    for (int i = 0; i < 20000; ++i) {
      auto d = draw_conditional(m, gam, rng);
      SurvivalSample s;
      s.id = std::to_string(i);
      s.time = d.time;
      s.status = 1;
      s.arm = d.arm;
      data.push_back(std::move(s));
    }
    auto fit = cox_fit(data, CovariateSelector{});
    double dev = std::fabs(fit.beta[0] + std::log(2.0));
    add("cox-recovery", dev, 3.0 * fit.se[0]);
  }

  if (want("causal-hr")) {
    double beta = std::log(0.5), theta = 0.5;
    auto pairs = gen_gamma_shared(beta, theta, 200000, {opt.seed, 31});
    auto mc = causal_hr_mc(pairs, {0.5, 1.0, 2.0}, 0.05);
    double dev = 0.0, tol = 0.0;
    for (const auto& pt : mc) {
      double truth = causal_hr_closed(beta, theta, pt.t);
      dev = std::max(dev, std::fabs(pt.estimate - truth));
      tol = std::max(tol, 3.0 * pt.se);
    }
    add("causal-hr-oracle", dev, tol);
  }

  if (want("selection-under-cox")) {
    auto rows = cox_selection_check(-std::log(2.0),
                                    CumulativeHazard::constant_rate(0.4),
                                    100000, {opt.seed, 41}, {1.0, 2.0, 4.0});
    double dev = 0.0, tol = 0.0;
    for (const auto& r : rows) {
      dev = std::max(dev, std::fabs(r.empirical - r.analytic));
      tol = std::max(tol, 3.0 * r.se);
    }
    add("selection-under-cox", dev, tol);
  }

  if (want("hazard-difference")) {
    AdditiveHazardSpec spec;
    spec.psi = StepFunction::constant(0.1);
    spec.omega = [](double z) { return StepFunction::constant(z); };
    spec.frailty = FrailtySpec::discrete({{0.5, 0.5}, {1.5, 0.5}});
    auto res = hazard_difference_causal(spec, {0.2, 0.5, 1.0}, 50000,
                                        {opt.seed, 51}, 0.1);
    double dev = 0.0, tol = 0.0;
    for (std::size_t k = 0; k < res.t.size(); ++k) {
      dev = std::max(dev, std::fabs(res.mc_diff[k] - res.psi_true[k]));
      tol = std::max(tol, 3.0 * res.mc_se[k]);
      dev = std::max(dev, std::fabs(res.aalen_slope[k] - res.psi_true[k]));
      tol = std::max(tol, 3.0 * res.aalen_se[k]);
    }
    add("hazard-difference-collapsibility", dev, tol);
  }

  if (want("sensitivity")) {
    SensitivityInput in;
    in.obs_hr = [](double) { return 0.8; };
    in.surv0 = [](double) { return 0.9 * 0.7; };
    in.surv1 = [](double) { return 0.7; };
    in.sr = [](double) { return 1.5; };
    auto rows = sensitivity_sr(in, {0.0, 1.0, 2.0});
    double dev = 0.0;
    for (const auto& r : rows)
      dev = std::max(dev, std::fabs(r.causal_hr - 0.8 / (0.9 + 1.5 * 0.1)));
    in.sr = [](double) { return 1.0; };
    for (const auto& r : sensitivity_sr(in, {0.0, 1.0, 2.0}))
      dev = std::max(dev, std::fabs(r.causal_hr - 0.8));
    add("sensitivity-identities", dev, 1e-12);
  }

  return checks;
}

}  // namespace hazardlens
