#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hazardlens/causal_hr.hpp"
#include "hazardlens/coupling.hpp"
#include "hazardlens/cox.hpp"
#include "hazardlens/frailty.hpp"
#include "hazardlens/hazard_difference.hpp"
#include "hazardlens/kendall.hpp"
#include "hazardlens/sensitivity.hpp"
#include "hazardlens/stats_util.hpp"
#include "helpers.hpp"

using namespace hazardlens;
using Catch::Approx;

TEST_CASE("kendall tau matches the brute-force oracle") {
  RngStream rng({101, 0});
  std::vector<double> x, y;
  for (int i = 0; i < 400; ++i) {
    x.push_back(rng.uniform01());
    y.push_back(0.5 * x.back() + rng.uniform01());
  }
  CHECK(kendall_tau(x, y) == Approx(testutil::kendall_brute(x, y)).margin(1e-12));

  // with ties, against hand counting on a small set
  std::vector<double> xt{1, 1, 2, 3}, yt{1, 2, 2, 3};
  double tb = kendall_tau(xt, yt);
  // concordant pairs: (1,3),(1,4),(2,4),(3,4) = 4; ties block the rest
  // tau-b = 4 / sqrt((6-1)(6-1)) = 0.8
  CHECK(tb == Approx(0.8));

  std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8};
  CHECK(kendall_tau(a, b) == Approx(1.0));

  CHECK(theta_from_tau(0.0) == Approx(0.0));
  CHECK(theta_from_tau(0.5) == Approx(2.0));
  CHECK_THROWS_AS(theta_from_tau(1.0), input_error);
  CHECK_THROWS_AS(theta_from_tau(-0.1), input_error);
}

TEST_CASE("shared-gamma coupling marginals and dependence") {
  auto pairs = gen_gamma_shared(std::log(0.5), 0.5, 20000, {103, 0});
  std::vector<double> t0;
  for (const auto& p : pairs) {
    t0.push_back(p.t0);
    CHECK(p.t_obs == (p.a == 0 ? p.t0 : p.t1));
  }
  double ks = testutil::ks_distance_survival(
      t0, [](double t) { return std::exp(-t); });
  CHECK(ks < 0.02);

  auto nearly_indep = gen_gamma_shared(std::log(0.5), 1e-8, 20000, {103, 1});
  CHECK(std::fabs(kendall_tau(nearly_indep)) < 0.015);

  auto dep = gen_gamma_shared(std::log(0.5), 0.5, 100000, {103, 2});
  CHECK(std::fabs(kendall_tau(dep) - 0.2) < 0.02);
}

TEST_CASE("shared-gamma conditional hazard matches the construction given Z") {
  const double beta = std::log(0.5), theta = 0.5;
  auto pairs = gen_gamma_shared(beta, theta, 200000, {107, 0});
  // exact conditional cumulative hazards given z
  auto cum0 = [&](double t, double z) { return z * std::expm1(theta * t) / theta; };
  auto cum1 = [&](double t, double z) {
    return z * std::expm1(theta * std::exp(beta) * t) / theta;
  };
  for (double t : {0.3, 1.0}) {
    const double h = 0.1;
    double d0 = 0, mean0 = 0, var0 = 0, d1 = 0, mean1 = 0, var1 = 0;
    for (const auto& p : pairs) {
      if (p.t0 >= t) {
        double pr = -std::expm1(-(cum0(t + h, p.z) - cum0(t, p.z)));
        mean0 += pr;
        var0 += pr * (1 - pr);
        if (p.t0 < t + h) d0 += 1;
      }
      if (p.t1 >= t) {
        double pr = -std::expm1(-(cum1(t + h, p.z) - cum1(t, p.z)));
        mean1 += pr;
        var1 += pr * (1 - pr);
        if (p.t1 < t + h) d1 += 1;
      }
    }
    CHECK(std::fabs(d0 - mean0) < 3.0 * std::sqrt(var0));
    CHECK(std::fabs(d1 - mean1) < 3.0 * std::sqrt(var1));
  }
}

TEST_CASE("closed-form causal hazard ratio") {
  CHECK(causal_hr_closed(std::log(0.5), 2.0, 0.0) == Approx(0.5));
  CHECK(causal_hr_closed(std::log(0.5), 0.0, 5.0) == Approx(0.5));
  CHECK(causal_hr_closed(std::log(0.5), 0.5, 2.0) ==
        Approx(0.5 * std::exp(-0.5)).epsilon(1e-12));

  // monotone nonincreasing in t for beneficial treatment
  double prev = 1e9;
  for (double t = 0.0; t <= 5.0; t += 0.1) {
    double v = causal_hr_closed(std::log(0.5), 1.0, t);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }

  // identical to the fixed-frailty hazard ratio of the matching marginal model
  MarginalModel m{std::log(0.5), 0.0, std::numeric_limits<double>::infinity(),
                  CumulativeHazard::constant_rate(1.0)};
  for (double t : {0.5, 1.0, 2.0})
    CHECK(causal_hr_closed(std::log(0.5), 0.7, t) ==
          Approx(hrz_gamma_closed(m, 0.7, t)).epsilon(1e-14));
}

TEST_CASE("monte-carlo principal-stratum hazard ratio") {
  const double beta = std::log(0.5);
  auto pairs = gen_gamma_shared(beta, 0.5, 150000, {109, 0});
  auto mc = causal_hr_mc(pairs, {0.5, 1.0}, 0.05);
  for (const auto& pt : mc) {
    REQUIRE(pt.defined);
    CHECK(std::fabs(pt.estimate - causal_hr_closed(beta, 0.5, pt.t)) <
          3.0 * pt.se);
  }

  // independent arms: the stratum ratio is the plain constant hazard ratio
  auto indep = gen_gamma_shared(beta, 0.0, 150000, {109, 1});
  for (const auto& pt : causal_hr_mc(indep, {0.2, 0.8, 1.5}, 0.05)) {
    REQUIRE(pt.defined);
    CHECK(std::fabs(pt.estimate - 0.5) < 3.0 * pt.se);
  }

  // a thin stratum is flagged, not an error
  auto few = gen_gamma_shared(beta, 0.5, 300, {109, 2});
  auto far = causal_hr_mc(few, {20.0}, 0.05);
  CHECK_FALSE(far[0].defined);
}

TEST_CASE("additive coupling departs from any gamma-frailty curve") {
  const double beta = std::log(0.5);
  auto pairs = gen_shared_additive(0.5, beta, 400000, {113, 0});

  // moment check: T0 has mean (and variance) of a unit-mean gamma sum
  std::vector<double> t0;
  for (const auto& p : pairs) t0.push_back(p.t0);
  double se_mean = sd_of(t0) / std::sqrt(static_cast<double>(t0.size()));
  CHECK(std::fabs(mean_of(t0) - 1.0) < 3.0 * se_mean);

  // gamma-route curve from the fitted observed model and the empirical tau
  auto obs = observed_data(pairs);
  obs.resize(60000);  // plenty for a stable fit
  auto fit = cox_fit(obs, CovariateSelector{});
  double theta_hat = theta_from_tau(kendall_tau(pairs));
  std::vector<double> grid{0.25, 0.5, 1.0, 1.5, 2.0};
  auto gamma_route = causal_hr_curve_from_fit(fit, theta_hat, grid);
  auto mc = causal_hr_mc(pairs, grid, 0.05);
  bool diverges = false;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (mc[k].defined &&
        std::fabs(mc[k].estimate - gamma_route[k]) > 3.0 * mc[k].se)
      diverges = true;
  CHECK(diverges);
}

TEST_CASE("two-level coupling") {
  const double beta = -0.5;
  auto lambda0 = CumulativeHazard::constant_rate(1.0);
  auto pairs = gen_two_level(beta, lambda0, 20000, {127, 0});

  // marginal proportional-hazards recovery
  auto fit = cox_fit(observed_data(pairs), CovariateSelector{});
  CHECK(std::fabs(fit.beta[0] - beta) < 3.0 * fit.se[0]);

  // conditioning on the outer frailty changes the estimand
  // (non-collapsibility); the long-surviving low-frailty quartile
  // accumulates the most baseline hazard and shows the largest shift
  std::vector<double> z1;
  for (const auto& p : pairs) z1.push_back(p.z);
  double q1 = sample_quantile(z1, 0.25);
  std::vector<PotentialOutcomePair> low;
  for (const auto& p : pairs)
    if (p.z <= q1) low.push_back(p);
  auto fit_low = cox_fit(observed_data(low), CovariateSelector{});
  CHECK(std::fabs(fit_low.beta[0] - beta) > 3.0 * fit_low.se[0]);

  // degenerate inner frailty reduces to the single-frailty generator:
  // conditional survival given z1 is exp(-z1 (e^{L0 t} - 1))
  auto degen = gen_two_level(beta, lambda0, 150000, {127, 1}, 0.0);
  double t = 0.5;
  double d = 0, mean = 0, var = 0;
  for (const auto& p : degen) {
    double pr = std::exp(-p.z * std::expm1(t));  // P(T0 > t | z1)
    mean += pr;
    var += pr * (1 - pr);
    if (p.t0 > t) d += 1;
  }
  CHECK(std::fabs(d - mean) < 3.0 * std::sqrt(var));
}

TEST_CASE("selection is present under plain proportional hazards") {
  auto lambda0 = CumulativeHazard::constant_rate(0.4);
  auto rows = cox_selection_check(-std::log(2.0), lambda0, 100000, {131, 0},
                                  {0.0, 1.0, 2.0, 4.0});
  for (const auto& r : rows) {
    if (r.t == 0.0) CHECK(r.analytic == Approx(1.0));
    CHECK(std::fabs(r.empirical - r.analytic) < 3.0 * r.se);
  }
  // formula spot value: 1 + e^{a beta} L0(t) at t=2, a=1
  bool found = false;
  for (const auto& r : rows)
    if (r.t == 2.0 && r.arm == 1) {
      CHECK(r.analytic == Approx(1.4));
      found = true;
    }
  REQUIRE(found);
  // treated survivors retain lower V at every positive time
  for (double t : {1.0, 2.0, 4.0}) {
    double e0 = 0, e1 = 0;
    for (const auto& r : rows)
      if (r.t == t) (r.arm == 0 ? e0 : e1) = r.empirical;
    CHECK(e1 < e0);
  }
}

TEST_CASE("sensitivity-ratio identities") {
  SensitivityInput in;
  in.obs_hr = [](double) { return 0.8; };
  in.surv0 = [](double t) { return 0.9 * std::exp(-0.1 * t); };
  in.surv1 = [](double t) { return std::exp(-0.1 * t); };

  in.sr = [](double) { return 1.0; };
  for (const auto& r : sensitivity_sr(in, {0.0, 1.0, 3.0}))
    CHECK(r.causal_hr == Approx(0.8).epsilon(1e-15));

  in.sr = [](double) { return 1.5; };
  auto rows = sensitivity_sr(in, {0.0});
  CHECK(rows[0].causal_hr == Approx(0.8 / (0.9 + 1.5 * 0.1)).margin(1e-12));

  // SR >= 1 never weakens the effect
  in.sr = [](double t) { return 1.0 + 0.3 * t; };
  for (const auto& r : sensitivity_sr(in, make_grid(0.0, 5.0, 0.25)))
    CHECK(r.causal_hr <= 0.8 + 1e-12);

  // pi above one is clipped and flagged
  SensitivityInput noisy = in;
  noisy.surv0 = [](double) { return 0.95; };
  noisy.surv1 = [](double) { return 0.90; };
  auto clipped = sensitivity_sr(noisy, {1.0});
  CHECK(clipped[0].pi == Approx(1.0));
  CHECK(clipped[0].pi_clipped);

  in.sr = [](double) { return -0.5; };
  CHECK_THROWS_AS(sensitivity_sr(in, {1.0}), input_error);
}

TEST_CASE("sr spec parsing") {
  auto c = parse_sr_spec("const:1.5");
  CHECK(c(3.0) == Approx(1.5));
  auto pw = parse_sr_spec("piecewise:0=1,2=1.5,5=2");
  CHECK(pw(1.9) == Approx(1.0));
  CHECK(pw(2.0) == Approx(1.5));
  CHECK(pw(7.0) == Approx(2.0));
  CHECK_THROWS_AS(parse_sr_spec("const:abc"), input_error);
  CHECK_THROWS_AS(parse_sr_spec("piecewise:1=1"), input_error);
  CHECK_THROWS_AS(parse_sr_spec("nope"), input_error);
}

TEST_CASE("additive-hazards coupling: stratum difference and collapsibility") {
  AdditiveHazardSpec spec;
  spec.psi = StepFunction::constant(0.1);
  spec.omega = [](double z) { return StepFunction::constant(z); };
  spec.frailty = FrailtySpec::discrete({{0.5, 0.5}, {1.5, 0.5}});

  auto res = hazard_difference_causal(spec, {0.2, 0.5, 1.0}, 30000, {137, 0}, 0.1);
  for (std::size_t k = 0; k < res.t.size(); ++k) {
    CHECK(res.psi_true[k] == Approx(0.1));
    CHECK(std::fabs(res.mc_diff[k] - 0.1) < 3.0 * res.mc_se[k]);
    CHECK(std::fabs(res.aalen_slope[k] - 0.1) < 3.0 * res.aalen_se[k]);
  }

  // control-arm stratum hazard against the exact two-atom bin expectation
  auto pairs = gen_additive(spec, 200000, {137, 1});
  double t = 0.5, h = 0.1;
  double num_surv = 0, num_ev = 0;
  for (auto [z, p] : spec.frailty.atoms()) {
    double joint = p * std::exp(-(2 * z + 0.1) * t);
    num_surv += joint;
    num_ev += p * (std::exp(-z * t) - std::exp(-z * (t + h))) *
              std::exp(-(z + 0.1) * t);
  }
  double expected_rate = num_ev / num_surv / h;
  std::size_t n_str = 0, d0 = 0;
  for (const auto& p : pairs)
    if (p.t0 >= t && p.t1 >= t) {
      ++n_str;
      if (p.t0 < t + h) ++d0;
    }
  double rate = static_cast<double>(d0) / (h * static_cast<double>(n_str));
  double se = std::sqrt(static_cast<double>(d0)) / (h * static_cast<double>(n_str));
  CHECK(std::fabs(rate - expected_rate) < 3.0 * se);

  // null effect: all three curves near zero
  AdditiveHazardSpec null_spec = spec;
  null_spec.psi = StepFunction::constant(0.0);
  auto nres = hazard_difference_causal(null_spec, {0.3, 0.8}, 30000, {137, 2}, 0.1);
  for (std::size_t k = 0; k < nres.t.size(); ++k) {
    CHECK(std::fabs(nres.mc_diff[k]) < 3.0 * nres.mc_se[k]);
    CHECK(std::fabs(nres.aalen_slope[k]) < 3.0 * nres.aalen_se[k]);
  }

  // negative hazards are rejected with the offending point named
  AdditiveHazardSpec bad = spec;
  bad.psi = StepFunction({1.0}, {0.1, -2.0});
  CHECK_THROWS_AS(gen_additive(bad, 10, {137, 3}), estimation_error);
}
