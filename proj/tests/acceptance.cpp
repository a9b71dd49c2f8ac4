// Acceptance suite: runs every exit criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hazardlens/hazardlens.hpp"

using namespace hazardlens;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::string id;
  std::string summary;
  bool pass = true;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

const FrailtySpec kBinary = FrailtySpec::discrete({{0.2, 0.2}, {1.2, 0.8}});

MarginalModel study_model() {
  return {-std::log(2.0), 0.0, 4.0, CumulativeHazard::constant_rate(0.4)};
}

void c1_changepoint_replication(Criterion& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto cfg = load_config("sim31");
  cfg.emit_dataset = false;
  auto dir = fs::temp_directory_path() / "hl_acceptance_sim31";
  fs::remove_all(dir);
  auto res = run_experiment(cfg, dir.string());
  fs::remove_all(dir);
  const auto& agg = res.report["aggregate"];
  double b1 = agg["coxcp.beta1"]["mean"].get<double>();
  double b2 = agg["coxcp.beta2"]["mean"].get<double>();
  double cf = agg["censoring_fraction"]["mean"].get<double>();
  double elapsed = seconds_since(t0);
  c.expect(b1 >= -0.72 && b1 <= -0.62, "beta1 " + fmt(b1) + " outside [-0.72,-0.62]");
  c.expect(b2 >= -0.13 && b2 <= 0.07, "beta2 " + fmt(b2) + " outside [-0.13,0.07]");
  c.expect(std::fabs(cf - 0.19) <= 0.02, "censoring " + fmt(cf) + " outside 19%+-2%");
  c.expect(elapsed < 30.0, "runtime " + fmt(elapsed) + "s exceeds 30s");
  c.note("beta1=" + fmt(b1) + " beta2=" + fmt(b2) + " censored=" + fmt(cf) +
         " [" + fmt(elapsed) + "s]");
}

void c2_hrz_bound(Criterion& c) {
  auto m = study_model();
  double lo = 1e9, hi = -1e9;
  for (double t = 0.0; t <= 8.0 + 1e-9; t += 0.005) {
    double v = hrz_general(m, kBinary, t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  c.expect(lo >= 0.31, "min HR_Z " + fmt(lo) + " below 0.31");
  c.expect(hi <= 0.82, "max HR_Z " + fmt(hi) + " above 0.82");
  c.note("HR_Z range [" + fmt(lo) + ", " + fmt(hi) + "] on [0,8]");
}

void c3_selection_ordering(Criterion& c) {
  auto m = study_model();
  for (double t = 0.05; t <= 8.0 + 1e-9; t += 0.05) {
    double e1 = selection_mean(m, kBinary, 1, t);
    double e0 = selection_mean(m, kBinary, 0, t);
    if (!(e1 > e0)) {
      c.expect(false, "analytic ordering fails at t=" + fmt(t));
      break;
    }
  }
  const int n = 200000;
  RngStream rng({902210, 0});
  std::vector<double> z(n), tt(n);
  std::vector<int> a(n);
  for (int i = 0; i < n; ++i) {
    auto d = draw_conditional(m, kBinary, rng);
    z[i] = d.z;
    a[i] = d.arm;
    tt[i] = d.time;
  }
  double worst_gap = 1e9;
  for (double t = 1.0; t <= 8.0 + 1e-9; t += 1.0) {
    double sum[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (int i = 0; i < n; ++i)
      if (tt[i] > t) {
        sum[a[i]] += z[i];
        ++cnt[a[i]];
      }
    // standard errors from the analytic survivor variance: the empirical
    // one collapses when the rare high-frailty survivors drop out entirely
    double se_arm[2];
    for (int arm = 0; arm <= 1; ++arm) {
      double lstar = conditional_cumhaz(m, kBinary, arm, t);
      se_arm[arm] = std::sqrt(kBinary.posterior_variance(lstar) / cnt[arm]);
      double mean = sum[arm] / cnt[arm];
      double analytic = kBinary.posterior_mean(lstar);
      c.expect(std::fabs(mean - analytic) <= 3.0 * se_arm[arm],
               "MC mean off at t=" + fmt(t) + " arm=" + std::to_string(arm) +
                   " (" + fmt(mean) + " vs " + fmt(analytic) + ")");
    }
    double m1 = sum[1] / cnt[1], m0 = sum[0] / cnt[0];
    double se_diff = std::sqrt(se_arm[0] * se_arm[0] + se_arm[1] * se_arm[1]);
    c.expect(m1 - m0 > -3.0 * se_diff,
             "MC ordering violated beyond noise at t=" + fmt(t));
    worst_gap = std::min(worst_gap, m1 - m0);
  }
  c.note("smallest MC treated-control gap " + fmt(worst_gap));
}

void c4_kendall_mapping(Criterion& c) {
  auto t0 = std::chrono::steady_clock::now();
  for (double theta : {0.1, 0.5, 2.0}) {
    auto pairs = gen_gamma_shared(std::log(0.5), theta,
                                  100000, {424242, static_cast<std::uint64_t>(theta * 10)});
    double tau_hat = kendall_tau(pairs);
    double tau = theta / (theta + 2.0);
    c.expect(std::fabs(tau_hat - tau) < 0.02,
             "theta=" + fmt(theta) + ": tau_hat " + fmt(tau_hat) +
                 " vs " + fmt(tau));
    c.note("theta=" + fmt(theta) + " tau_hat=" + fmt(tau_hat));
  }
  double elapsed = seconds_since(t0);
  c.expect(elapsed < 20.0, "runtime " + fmt(elapsed) + "s exceeds 20s");
  c.note("[" + fmt(elapsed) + "s]");
}

void c5_causal_hr_oracle(Criterion& c) {
  auto t0 = std::chrono::steady_clock::now();
  const double beta = std::log(0.5);
  for (double theta : {0.5, 2.0}) {
    auto pairs = gen_gamma_shared(beta, theta, 500000,
                                  {550, static_cast<std::uint64_t>(theta * 10)});
    auto mc = causal_hr_mc(pairs, {0.0, 0.5, 1.0, 2.0}, 0.05);
    for (const auto& pt : mc) {
      double truth = pt.t == 0.0 ? 0.5 : causal_hr_closed(beta, theta, pt.t);
      c.expect(pt.defined, "stratum too thin at t=" + fmt(pt.t));
      if (pt.defined)
        c.expect(std::fabs(pt.estimate - truth) <= 3.0 * pt.se,
                 "theta=" + fmt(theta) + " t=" + fmt(pt.t) + ": " +
                     fmt(pt.estimate) + " vs " + fmt(truth) + " (se " +
                     fmt(pt.se) + ")");
    }
    c.note("theta=" + fmt(theta) + " hr(0)=" + fmt(mc[0].estimate));
  }
  double elapsed = seconds_since(t0);
  c.expect(elapsed < 60.0, "runtime " + fmt(elapsed) + "s exceeds 60s");
  c.note("[" + fmt(elapsed) + "s]");
}

void c6_curve_family_shape(Criterion& c) {
  auto cfg = load_config("fig3");
  const std::vector<double> taus = cfg.taus;
  c.expect(taus.size() == 6, "expected six taus in fig3");
  std::vector<std::vector<double>> curves;
  for (double tau : taus) {
    std::vector<double> vals;
    for (double t : cfg.tgrid)
      vals.push_back(causal_hr_closed(cfg.beta, theta_from_tau(tau), t));
    curves.push_back(std::move(vals));
  }
  for (const auto& cv : curves)
    c.expect(std::fabs(cv.front() - 0.5) < 1e-12, "curve does not start at 0.5");
  for (double v : curves[0])
    c.expect(std::fabs(v - 0.5) < 1e-12, "tau=0 curve not constant");
  for (std::size_t k = 1; k < cfg.tgrid.size(); ++k)
    for (std::size_t i = 1; i < curves.size(); ++i)
      c.expect(curves[i][k] < curves[i - 1][k],
               "curves not ordered in tau at t=" + fmt(cfg.tgrid[k]));
  double at3 = curves.back().back();
  c.expect(at3 < 0.05, "tau=0.98 curve is " + fmt(at3) + " at t=3");
  c.note("tau=0.98 value at t=3: " + fmt(at3));
}

void c7_marginalization_identities(Criterion& c) {
  for (const auto& f :
       {FrailtySpec::gamma(0.4), FrailtySpec::gamma(1.0), kBinary}) {
    double dev = 0.0;
    for (int k = 1; k <= 99; ++k) {
      double s = k / 100.0;
      dev = std::max(dev, std::fabs(f.laplace(f.inv_laplace(s)) - s));
    }
    c.expect(dev <= 1e-10, "laplace round trip deviation " + fmt(dev));
  }

  auto m = study_model();
  double dev = 0.0;
  for (double t : {0.5, 2.0, 4.0, 6.0}) {
    for (int arm = 0; arm <= 1; ++arm) {
      double target = std::exp(-m.cumhaz(t, arm));
      double lg = conditional_cumhaz(m, FrailtySpec::gamma(1.0), arm, t);
      dev = std::max(dev, std::fabs(detail::gamma_laplace_quadrature(1.0, lg) - target));
      double ld = conditional_cumhaz(m, kBinary, arm, t);
      double sum = 0.0;
      for (auto& [z, p] : kBinary.atoms()) sum += p * std::exp(-z * ld);
      dev = std::max(dev, std::fabs(sum - target));
    }
  }
  c.expect(dev <= 1e-10, "marginalization identity deviation " + fmt(dev));
  c.note("identity deviation " + fmt(dev));

  // single-frailty generator, proportional-hazards case
  {
    MarginalModel mc{-std::log(2.0), 0.0, std::numeric_limits<double>::infinity(),
                     CumulativeHazard::constant_rate(0.4)};
    RngStream rng({70707, 0});
    std::vector<SurvivalSample> data;
    for (int i = 0; i < 20000; ++i) {
      auto d = draw_conditional(mc, FrailtySpec::gamma(1.0), rng);
      SurvivalSample s;
      s.id = std::to_string(i);
      s.time = d.time;
      s.status = 1;
      s.arm = d.arm;
      data.push_back(std::move(s));
    }
    auto fit = cox_fit(data, CovariateSelector{});
    c.expect(std::fabs(fit.beta[0] + std::log(2.0)) <= 3.0 * fit.se[0],
             "frailty generator: beta_hat " + fmt(fit.beta[0]));
    c.note("single-frailty beta_hat=" + fmt(fit.beta[0]));
  }

  // two-level generator
  {
    auto pairs = gen_two_level(-std::log(2.0),
                               CumulativeHazard::constant_rate(0.4), 20000,
                               {70708, 0});
    auto fit = cox_fit(observed_data(pairs), CovariateSelector{});
    c.expect(std::fabs(fit.beta[0] + std::log(2.0)) <= 3.0 * fit.se[0],
             "two-level generator: beta_hat " + fmt(fit.beta[0]));
    c.note("two-level beta_hat=" + fmt(fit.beta[0]));
  }
}

void c8_selection_under_cox(Criterion& c) {
  auto rows = cox_selection_check(-std::log(2.0),
                                  CumulativeHazard::constant_rate(0.4), 100000,
                                  {80808, 0}, {1.0, 2.0, 4.0});
  for (const auto& r : rows)
    c.expect(std::fabs(r.empirical - r.analytic) <= 3.0 * r.se,
             "t=" + fmt(r.t) + " arm=" + std::to_string(r.arm) + ": " +
                 fmt(r.empirical) + " vs " + fmt(r.analytic));
  for (double t : {1.0, 2.0, 4.0}) {
    double e0 = 0, e1 = 0;
    for (const auto& r : rows)
      if (r.t == t) (r.arm == 0 ? e0 : e1) = r.empirical;
    c.expect(e1 < e0, "treated curve not below control at t=" + fmt(t));
  }
  c.note("conditional means match 1 + e^{a beta} L0(t) at all grid points");
}

void c9_hazard_difference(Criterion& c) {
  AdditiveHazardSpec spec;
  spec.psi = StepFunction::constant(0.1);
  spec.omega = [](double z) { return StepFunction::constant(z); };
  spec.frailty = FrailtySpec::discrete({{0.5, 0.5}, {1.5, 0.5}});
  auto res = hazard_difference_causal(spec, {0.2, 0.5, 1.0}, 50000, {90909, 0}, 0.1);
  for (std::size_t k = 0; k < res.t.size(); ++k) {
    c.expect(std::fabs(res.mc_diff[k] - res.psi_true[k]) <= 3.0 * res.mc_se[k],
             "stratum difference off at t=" + fmt(res.t[k]) + " (" +
                 fmt(res.mc_diff[k]) + ")");
    c.expect(std::fabs(res.aalen_slope[k] - res.psi_true[k]) <= 3.0 * res.aalen_se[k],
             "marginal slope off at t=" + fmt(res.t[k]) + " (" +
                 fmt(res.aalen_slope[k]) + ")");
  }
  c.note("stratum diff at t=0.5: " + fmt(res.mc_diff[1]) + ", marginal slope " +
         fmt(res.aalen_slope[1]));

  // additive fit on the change-point study: early benefit, then nothing
  auto cfg = load_config("sim31");
  auto g = detail::generate_dgp(cfg, SeedSpec{cfg.seed, 0});
  RngStream censor_rng(SeedSpec{cfg.seed, 0}.substream(1));
  auto observed = apply_censoring(g.samples, cfg.censoring, censor_rng);
  auto fit = aalen_fit(observed, CovariateSelector{});
  auto early = constant_effect(fit, 1, 0.0, 4.0, 1000, {90909, 1});
  auto late = constant_effect(fit, 1, 4.0, 8.0, 1000, {90909, 2});
  c.expect(early.psi + 3.0 * early.se < 0.0,
           "early slope not negative: " + fmt(early.psi));
  c.expect(std::fabs(late.psi) <= 1.96 * late.se,
           "late slope interval excludes 0: " + fmt(late.psi) + " +- " +
               fmt(late.se));
  c.note("early slope " + fmt(early.psi) + ", late slope " + fmt(late.psi) +
         " (se " + fmt(late.se) + ")");
}

void c10_sensitivity_identities(Criterion& c) {
  SensitivityInput in;
  in.obs_hr = [](double t) { return 0.8 + 0.05 * std::sin(t); };
  in.surv0 = [](double t) { return 0.9 * std::exp(-0.1 * t); };
  in.surv1 = [](double t) { return std::exp(-0.1 * t); };
  in.sr = [](double) { return 1.0; };
  double dev = 0.0;
  for (const auto& r : sensitivity_sr(in, make_grid(0.0, 5.0, 0.25)))
    dev = std::max(dev, std::fabs(r.causal_hr - r.obs_hr));
  c.expect(dev == 0.0, "SR=1 identity deviation " + fmt(dev));

  in.obs_hr = [](double) { return 0.8; };
  in.sr = [](double) { return 1.5; };
  double worked = sensitivity_sr(in, {0.0})[0].causal_hr;
  c.expect(std::fabs(worked - 0.8 / (0.9 + 1.5 * 0.1)) <= 1e-12,
           "worked value " + fmt(worked));
  c.note("worked value " + fmt(worked));

  // coupling curves from a fitted model with a beneficial effect
  auto data = [&] {
    RngStream rng({101010, 0});
    std::vector<SurvivalSample> out;
    for (int i = 0; i < 8000; ++i) {
      SurvivalSample s;
      s.id = std::to_string(i);
      s.arm = rng.bernoulli(0.5) ? 1 : 0;
      s.time = rng.exponential() / (0.1 * std::exp(std::log(0.75) * s.arm));
      s.status = 1;
      out.push_back(std::move(s));
    }
    return out;
  }();
  auto fit = cox_fit(data, CovariateSelector{});
  c.expect(std::exp(fit.beta[0]) < 1.0, "fitted effect not beneficial");
  auto grid = make_grid(0.5, 20.0, 0.5);
  std::vector<std::vector<double>> curves;
  for (double tau : {0.1, 0.2, 0.3})
    curves.push_back(causal_hr_curve_from_fit(fit, theta_from_tau(tau), grid));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (const auto& cv : curves)
      c.expect(cv[k] <= std::exp(fit.beta[0]) + 1e-12,
               "coupling curve above e^beta at t=" + fmt(grid[k]));
    c.expect(curves[1][k] < curves[0][k] && curves[2][k] < curves[1][k],
             "curves not ordered in tau at t=" + fmt(grid[k]));
  }
  c.note("e^beta_hat=" + fmt(std::exp(fit.beta[0])));
}

void c11_additive_coupling_divergence(Criterion& c) {
  const double beta = std::log(0.5);
  auto pairs = gen_shared_additive(0.5, beta, 400000, {111111, 0});

  std::vector<double> t0;
  t0.reserve(pairs.size());
  for (const auto& p : pairs) t0.push_back(p.t0);
  double se_mean = sd_of(t0) / std::sqrt(static_cast<double>(t0.size()));
  c.expect(std::fabs(mean_of(t0) - 1.0) <= 3.0 * se_mean,
           "mean T0 " + fmt(mean_of(t0)) + " not 1 within 3 SEs");
  c.note("mean T0 = " + fmt(mean_of(t0)) + " (se " + fmt(se_mean) + ")");

  auto obs = observed_data(pairs);
  obs.resize(60000);
  auto fit = cox_fit(obs, CovariateSelector{});
  double theta_hat = theta_from_tau(kendall_tau(pairs));
  std::vector<double> grid{0.25, 0.5, 1.0, 1.5, 2.0};
  auto gamma_route = causal_hr_curve_from_fit(fit, theta_hat, grid);
  auto mc = causal_hr_mc(pairs, grid, 0.05);
  double max_sigma = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (mc[k].defined)
      max_sigma = std::max(max_sigma,
                           std::fabs(mc[k].estimate - gamma_route[k]) / mc[k].se);
  c.expect(max_sigma > 3.0,
           "no grid point separates the routes (max " + fmt(max_sigma) + " SEs)");
  c.note("largest separation " + fmt(max_sigma) + " SEs; tau_hat=" +
         fmt(kendall_tau(pairs)));
}

}  // namespace

int main() {
  std::vector<Criterion> criteria;
  auto run = [&](const std::string& id, const std::string& summary,
                 const std::function<void(Criterion&)>& fn) {
    Criterion c;
    c.id = id;
    c.summary = summary;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.pass = false;
      c.notes.push_back(std::string("exception: ") + e.what());
    }
    criteria.push_back(std::move(c));
  };

  run("A1", "change-point replication on the bundled binary-frailty study",
      c1_changepoint_replication);
  run("A2", "conditional hazard ratio stays within [0.31, 0.82] on [0, 8]",
      c2_hrz_bound);
  run("A3", "treated survivors are frailer at every time", c3_selection_ordering);
  run("A4", "Kendall tau matches theta/(theta+2)", c4_kendall_mapping);
  run("A5", "Monte-Carlo causal hazard ratio matches the closed form",
      c5_causal_hr_oracle);
  run("A6", "coupling-strength curve family: start, order and collapse",
      c6_curve_family_shape);
  run("A7", "marginalization identities and generator recovery",
      c7_marginalization_identities);
  run("A8", "selection under plain proportional hazards", c8_selection_under_cox);
  run("A9", "hazard differences: stratum, marginal and specified agree",
      c9_hazard_difference);
  run("A10", "sensitivity-ratio identities and coupling-curve ordering",
      c10_sensitivity_identities);
  run("A11", "additive coupling breaks the frailty-route equality",
      c11_additive_coupling_divergence);

  int failures = 0;
  for (const auto& c : criteria) {
    std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.id.c_str(),
                c.summary.c_str());
    for (const auto& n : c.notes) std::printf("       %s\n", n.c_str());
    failures += c.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
