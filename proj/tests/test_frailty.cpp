#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hazardlens/cox.hpp"
#include "hazardlens/frailty.hpp"
#include "hazardlens/stats_util.hpp"
#include "helpers.hpp"

using namespace hazardlens;
using Catch::Approx;

namespace {

const FrailtySpec kBinary = FrailtySpec::discrete({{0.2, 0.2}, {1.2, 0.8}});

MarginalModel study_model() {
  return {-std::log(2.0), 0.0, 4.0, CumulativeHazard::constant_rate(0.4)};
}

}  // namespace

TEST_CASE("laplace transform values") {
  auto g1 = FrailtySpec::gamma(1.0);
  CHECK(g1.laplace(1.0) == Approx(0.5));
  CHECK(kBinary.laplace(0.0) == Approx(1.0));
  CHECK(kBinary.laplace(1.0) ==
        Approx(0.2 * std::exp(-0.2) + 0.8 * std::exp(-1.2)).epsilon(1e-12));
  CHECK(kBinary.mean() == Approx(1.0));
  CHECK(g1.dlog_laplace(0.0) == Approx(-1.0));  // -E(Z) at u = 0
  CHECK(kBinary.dlog_laplace(0.0) == Approx(-1.0));
  CHECK(g1.neg_log_laplace(1.0) == Approx(std::log(2.0)));
  CHECK(kBinary.neg_log_laplace(700.0) ==
        Approx(0.2 * 700.0 - std::log(0.2)).epsilon(1e-9));
}

TEST_CASE("laplace inversion") {
  auto g1 = FrailtySpec::gamma(1.0);
  CHECK(g1.inv_laplace(0.5) == Approx(1.0));
  CHECK(kBinary.inv_laplace(0.2 * std::exp(-0.2) + 0.8 * std::exp(-1.2)) ==
        Approx(1.0).margin(1e-9));
  CHECK_THROWS_AS(g1.inv_laplace(0.0), std::domain_error);
  CHECK_THROWS_AS(g1.inv_laplace(1.5), std::domain_error);

  for (const auto& f : {FrailtySpec::gamma(0.3), FrailtySpec::gamma(2.0), kBinary}) {
    for (int k = 1; k <= 99; ++k) {
      double s = k / 100.0;
      CHECK(f.laplace(f.inv_laplace(s)) == Approx(s).margin(1e-10));
    }
  }
}

TEST_CASE("conditional cumulative hazard") {
  auto m = study_model();
  auto g1 = FrailtySpec::gamma(1.0);
  CHECK(conditional_cumhaz(m, g1, 0, 0.0) == Approx(0.0));
  CHECK(conditional_cumhaz(m, g1, 0, 1.0) == Approx(std::exp(0.4) - 1.0));
  auto tiny = FrailtySpec::gamma(1e-8);
  CHECK(conditional_cumhaz(m, tiny, 0, 1.0) == Approx(0.4).margin(1e-6));
}

TEST_CASE("marginalization identity") {
  auto m = study_model();
  for (const auto& f : {FrailtySpec::gamma(1.0), kBinary}) {
    for (double t : {0.5, 2.0, 4.0, 6.0, 8.0}) {
      for (int arm = 0; arm <= 1; ++arm) {
        double lstar = conditional_cumhaz(m, f, arm, t);
        double sum;
        if (f.is_gamma()) {
          sum = f.laplace(lstar);
        } else {
          sum = 0.0;
          for (auto& [z, p] : f.atoms()) sum += p * std::exp(-z * lstar);
        }
        CHECK(sum == Approx(std::exp(-m.cumhaz(t, arm))).margin(1e-10));
      }
    }
  }
}

TEST_CASE("conditional hazard-ratio curves") {
  auto m = study_model();

  // frailty-free limit
  auto tiny = FrailtySpec::gamma(1e-10);
  CHECK(hrz_general(m, tiny, 2.0) == Approx(0.5).margin(1e-6));

  // closed-form spot value after the change point (beta2 = 0)
  CHECK(hrz_gamma_closed(m, 1.0, 6.0) == Approx(std::exp(-0.8)).epsilon(1e-12));

  // the two routes agree for Gamma frailty
  for (double theta : {0.3, 1.0, 2.5}) {
    auto f = FrailtySpec::gamma(theta);
    for (int k = 1; k <= 100; ++k) {
      double t = 8.0 * k / 100.0;
      CHECK(hrz_gamma_closed(m, theta, t) ==
            Approx(hrz_general(m, f, t)).margin(1e-9));
    }
  }

  // binary-frailty study configuration stays within the published range
  auto grid = make_grid(0.0, 8.0, 0.01);
  auto vals = hrz_curve(m, kBinary, grid);
  for (double v : vals) {
    CHECK(v >= 0.31);
    CHECK(v <= 0.82);
  }

  // beneficial treatment: HR_Z below 1 everywhere
  for (double v : vals) CHECK(v < 1.0);
}

TEST_CASE("g transform is increasing") {
  for (const auto& f : {FrailtySpec::gamma(0.5), FrailtySpec::gamma(2.0), kBinary}) {
    double prev = 0.0;
    for (int k = 1; k <= 99; ++k) {
      double g = g_frailty(f, k / 100.0);
      CHECK(g >= prev);
      prev = g;
    }
  }
}

TEST_CASE("selection curves") {
  auto m = study_model();
  auto g1 = FrailtySpec::gamma(1.0);

  auto sc = selection_curve(m, g1, {0.0, 2.0});
  CHECK(sc.ratio[0] == Approx(1.0));
  CHECK(sc.ratio[1] == Approx(std::exp(0.4)).epsilon(1e-10));

  // treated survivors are frailer at every positive time
  auto grid = make_grid(0.1, 8.0, 0.1);
  auto sb = selection_curve(m, kBinary, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(sb.mean_treated[k] > sb.mean_control[k]);

  // Monte-Carlo conditional means match the closed form
  RngStream rng({2024, 5});
  const int n = 200000;
  std::vector<double> z(n), t(n);
  std::vector<int> a(n);
  for (int i = 0; i < n; ++i) {
    auto d = draw_conditional(m, kBinary, rng);
    z[i] = d.z;
    a[i] = d.arm;
    t[i] = d.time;
  }
  for (double tq : {2.0, 4.0, 6.0, 8.0}) {
    for (int arm = 0; arm <= 1; ++arm) {
      double sum = 0.0;
      int cnt = 0;
      for (int i = 0; i < n; ++i)
        if (a[i] == arm && t[i] > tq) {
          sum += z[i];
          ++cnt;
        }
      REQUIRE(cnt > 100);
      double expected = selection_mean(m, kBinary, arm, tq);
      CHECK(sum / cnt == Approx(expected).margin(0.01));
    }
  }
}

TEST_CASE("frailty generator reproduces the marginal model") {
  // plain proportional hazards (nu = infinity), Gamma frailty
  MarginalModel m{-std::log(2.0), 0.0, std::numeric_limits<double>::infinity(),
                  CumulativeHazard::constant_rate(0.4)};
  auto f = FrailtySpec::gamma(1.0);
  RngStream rng({77, 0});
  std::vector<SurvivalSample> data;
  for (int i = 0; i < 20000; ++i) {
    auto d = draw_conditional(m, f, rng);
    SurvivalSample s;
    s.id = std::to_string(i);
    s.time = d.time;
    s.status = 1;
    s.arm = d.arm;
    data.push_back(std::move(s));
  }
  auto fit = cox_fit(data, CovariateSelector{});
  CHECK(std::fabs(fit.beta[0] + std::log(2.0)) < 3.0 * fit.se[0]);

  // degenerate frailty: marginal survival matches exactly in distribution
  auto tiny = FrailtySpec::gamma(1e-10);
  RngStream rng2({78, 0});
  std::vector<double> t0;
  for (int i = 0; i < 20000; ++i)
    t0.push_back(draw_event_time(m, tiny, tiny.sample(rng2), 0, rng2));
  double ks = testutil::ks_distance_survival(
      t0, [](double t) { return std::exp(-0.4 * t); });
  CHECK(ks < 0.02);
}
