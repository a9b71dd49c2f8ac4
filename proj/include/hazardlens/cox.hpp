#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hazardlens/errors.hpp"
#include "hazardlens/linalg.hpp"
#include "hazardlens/step_function.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

/// Chooses the design columns for regression estimators: the arm indicator
/// and/or a subset of the covariate vector (0-based indices).
struct CovariateSelector {
  bool include_arm = true;
  std::vector<std::size_t> covariate_indices;

  std::size_t dim() const {
    return (include_arm ? 1u : 0u) + covariate_indices.size();
  }

  std::vector<double> row(const SurvivalSample& s) const {
    std::vector<double> x;
    x.reserve(dim());
    if (include_arm) x.push_back(static_cast<double>(s.arm));
    for (std::size_t j : covariate_indices) {
      if (j >= s.covariates.size())
        throw input_error("covariate index out of range");
      x.push_back(s.covariates[j]);
    }
    return x;
  }
};

struct CoxOptions {
  int max_iter = 50;
  double loglik_rtol = 1e-9;
  double score_tol = 1e-6;
  double beta_bound = 15.0;  // |beta| beyond this is treated as divergence
};

struct CoxFit {
  std::vector<double> beta;
  std::vector<double> se;
  SymMatrix covariance;
  StepFunction baseline_cumhaz;  // Breslow estimator, step cumulative
  double loglik = 0.0;
  int n_iter = 0;
  bool converged = false;
};

/// Non-convergence within the iteration budget; carries the last iterate so
/// callers can inspect how far the fit got.
struct convergence_error : estimation_error {
  CoxFit last_iterate;
  convergence_error(const std::string& msg, CoxFit fit)
      : estimation_error(msg), last_iterate(std::move(fit)) {}
};

/// Counting-process data: each row is at risk on (start, stop] with the
/// event indicator applying at stop. Covariates are stored flat, p per row.
struct CoxData {
  std::vector<double> start, stop;
  std::vector<int> status;
  std::vector<double> x;  // n * p
  std::size_t p = 0;

  std::size_t n() const { return stop.size(); }
};

namespace detail {

struct CoxWork {
  std::vector<std::size_t> by_stop_desc;   // addition order
  std::vector<std::size_t> by_start_desc;  // removal order
  std::vector<double> event_times_desc;    // distinct, descending
  std::vector<int> d;                      // events per event time
  std::vector<double> sumx_events;         // per event time, p entries

  explicit CoxWork(const CoxData& data) {
    const std::size_t n = data.n(), p = data.p;
    by_stop_desc.resize(n);
    std::iota(by_stop_desc.begin(), by_stop_desc.end(), 0);
    std::sort(by_stop_desc.begin(), by_stop_desc.end(),
              [&](std::size_t a, std::size_t b) { return data.stop[a] > data.stop[b]; });
    by_start_desc = by_stop_desc;
    std::sort(by_start_desc.begin(), by_start_desc.end(),
              [&](std::size_t a, std::size_t b) { return data.start[a] > data.start[b]; });

    std::vector<double> times;
    for (std::size_t i = 0; i < n; ++i)
      if (data.status[i] == 1) times.push_back(data.stop[i]);
    std::sort(times.begin(), times.end(), std::greater<>());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    event_times_desc = std::move(times);

    d.assign(event_times_desc.size(), 0);
    sumx_events.assign(event_times_desc.size() * p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (data.status[i] != 1) continue;
      auto it = std::lower_bound(event_times_desc.begin(), event_times_desc.end(),
                                 data.stop[i], std::greater<>());
      std::size_t k = static_cast<std::size_t>(it - event_times_desc.begin());
      ++d[k];
      for (std::size_t j = 0; j < p; ++j)
        sumx_events[k * p + j] += data.x[i * p + j];
    }
  }
};

struct CoxEval {
  double loglik = 0.0;
  std::vector<double> score;
  SymMatrix info;
};

/// One sweep over risk sets (descending time) computing the Breslow partial
/// log-likelihood, score and observed information at beta. Optionally
/// captures S0 at each event time for the baseline estimator.
inline CoxEval cox_eval(const CoxData& data, const CoxWork& work,
                        const std::vector<double>& beta,
                        std::vector<double>* s0_at_events = nullptr) {
  const std::size_t p = data.p;
  CoxEval ev;
  ev.score.assign(p, 0.0);
  ev.info = SymMatrix(p);
  if (s0_at_events) s0_at_events->assign(work.event_times_desc.size(), 0.0);

  double s0 = 0.0;
  std::vector<double> s1(p, 0.0);
  SymMatrix s2(p);
  auto weight = [&](std::size_t i) {
    double xb = 0.0;
    for (std::size_t j = 0; j < p; ++j) xb += data.x[i * p + j] * beta[j];
    return std::exp(xb);
  };
  auto apply = [&](std::size_t i, double sign) {
    double w = sign * weight(i);
    s0 += w;
    for (std::size_t j = 0; j < p; ++j) {
      double xw = data.x[i * p + j] * w;
      s1[j] += xw;
      for (std::size_t l = 0; l <= j; ++l) s2(j, l) += xw * data.x[i * p + l];
    }
  };

  std::size_t ai = 0, ri = 0;
  const std::size_t n = data.n();
  for (std::size_t k = 0; k < work.event_times_desc.size(); ++k) {
    double t = work.event_times_desc[k];
    while (ai < n && data.stop[work.by_stop_desc[ai]] >= t)
      apply(work.by_stop_desc[ai++], +1.0);
    while (ri < n && data.start[work.by_start_desc[ri]] >= t)
      apply(work.by_start_desc[ri++], -1.0);

    if (!(s0 > 0.0))
      throw estimation_error("cox_fit: empty risk set at an event time");
    if (s0_at_events) (*s0_at_events)[k] = s0;

    double dk = work.d[k];
    ev.loglik -= dk * std::log(s0);
    for (std::size_t j = 0; j < p; ++j) {
      double xbar = s1[j] / s0;
      ev.score[j] += work.sumx_events[k * p + j] - dk * xbar;
      for (std::size_t l = 0; l <= j; ++l) {
        double v = dk * (s2(j, l) / s0 - xbar * (s1[l] / s0));
        ev.info(j, l) += v;
        if (j != l) ev.info(l, j) = ev.info(j, l);
      }
    }
  }
  // linear part of the log-likelihood: sum over events of x_i' beta
  for (std::size_t k = 0; k < work.event_times_desc.size(); ++k)
    for (std::size_t j = 0; j < p; ++j)
      ev.loglik += work.sumx_events[k * p + j] * beta[j];
  return ev;
}

inline StepFunction breslow_from_s0(const CoxWork& work,
                                    const std::vector<double>& s0_desc) {
  std::vector<double> jumps, values{0.0};
  double cum = 0.0;
  for (std::size_t k = work.event_times_desc.size(); k-- > 0;) {
    cum += work.d[k] / s0_desc[k];
    jumps.push_back(work.event_times_desc[k]);
    values.push_back(cum);
  }
  return StepFunction(std::move(jumps), std::move(values));
}

}  // namespace detail

/// Breslow baseline cumulative hazard at a fixed coefficient vector. At
/// beta = 0 this is exactly the Nelson-Aalen estimator.
inline StepFunction breslow_baseline(const CoxData& data,
                                     const std::vector<double>& beta) {
  detail::CoxWork work(data);
  std::vector<double> s0;
  detail::cox_eval(data, work, beta, &s0);
  return detail::breslow_from_s0(work, s0);
}

/// Newton maximization of the Breslow partial likelihood with step-halving,
/// starting from 0. Standard errors come from the inverse observed
/// information; the baseline is the Breslow estimator at the solution.
inline CoxFit cox_fit_data(const CoxData& data, const CoxOptions& opt = {}) {
  if (data.p == 0) throw estimation_error("cox_fit: no covariates selected");
  detail::CoxWork work(data);
  if (work.event_times_desc.empty())
    throw estimation_error("cox_fit: no events in the data");

  const std::size_t p = data.p;
  std::vector<double> beta(p, 0.0);
  detail::CoxEval ev = detail::cox_eval(data, work, beta);
  CoxFit fit;

  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    auto step = solve_spd(ev.info, ev.score, "cox_fit");
    std::vector<double> beta_new(p);
    detail::CoxEval ev_new;
    double factor = 1.0;
    // accept any non-decrease up to roundoff in the accumulated sums
    const double slack = 1e-10 * (1.0 + std::fabs(ev.loglik));
    for (int half = 0;; ++half) {
      for (std::size_t j = 0; j < p; ++j)
        beta_new[j] = beta[j] + factor * step[j];
      ev_new = detail::cox_eval(data, work, beta_new);
      if (ev_new.loglik >= ev.loglik - slack || half >= 30) break;
      factor *= 0.5;
    }
    double rel_change =
        std::fabs(ev_new.loglik - ev.loglik) / (1.0 + std::fabs(ev.loglik));
    beta = beta_new;
    double score_max = 0.0;
    for (double s : ev_new.score) score_max = std::max(score_max, std::fabs(s));
    ev = std::move(ev_new);
    fit.n_iter = iter;

    for (double b : beta)
      if (std::fabs(b) > opt.beta_bound)
        throw estimation_error(
            "cox_fit: coefficient diverging (monotone likelihood / "
            "complete separation in risk sets)");

    if (score_max < opt.score_tol && rel_change < opt.loglik_rtol) {
      fit.converged = true;
      break;
    }
  }

  fit.beta = beta;
  fit.loglik = ev.loglik;
  fit.covariance = invert_spd(ev.info, "cox_fit");
  fit.se.resize(p);
  for (std::size_t j = 0; j < p; ++j) fit.se[j] = std::sqrt(fit.covariance(j, j));
  std::vector<double> s0;
  detail::cox_eval(data, work, beta, &s0);
  fit.baseline_cumhaz = detail::breslow_from_s0(work, s0);

  if (!fit.converged) {
    std::string msg = "cox_fit: no convergence in " +
                      std::to_string(opt.max_iter) + " iterations, beta =";
    for (double b : fit.beta) msg += " " + std::to_string(b);
    throw convergence_error(msg, fit);
  }
  return fit;
}

inline CoxData build_cox_data(const std::vector<SurvivalSample>& samples,
                              const CovariateSelector& sel) {
  CoxData data;
  data.p = sel.dim();
  data.start.reserve(samples.size());
  for (const auto& s : samples) {
    data.start.push_back(0.0);
    data.stop.push_back(s.time);
    data.status.push_back(s.status);
    auto x = sel.row(s);
    data.x.insert(data.x.end(), x.begin(), x.end());
  }
  return data;
}

inline CoxFit cox_fit(const std::vector<SurvivalSample>& samples,
                      const CovariateSelector& sel = {},
                      const CoxOptions& opt = {}) {
  if (samples.empty()) throw estimation_error("cox_fit: empty dataset");
  return cox_fit_data(build_cox_data(samples, sel), opt);
}

/// The change-point model: separate log hazard ratios before and after nu,
/// sharing one baseline.
struct ChangePointCoxFit {
  double beta1 = std::numeric_limits<double>::quiet_NaN();
  double beta2 = std::numeric_limits<double>::quiet_NaN();
  double se1 = std::numeric_limits<double>::quiet_NaN();
  double se2 = std::numeric_limits<double>::quiet_NaN();
  bool beta1_identified = false;
  bool beta2_identified = false;
  double nu = 0.0;
  StepFunction baseline_cumhaz;
  double loglik = 0.0;
  int n_iter = 0;
};

/// Fits the two-coefficient Cox model with time-dependent covariates
/// A*1(t<=nu) and A*1(t>nu) by splitting each subject's follow-up at nu.
/// A side of nu with no usable events leaves that coefficient flagged
/// non-identified (NaN) and the other side is fitted alone.
inline ChangePointCoxFit cox_changepoint_fit(
    const std::vector<SurvivalSample>& samples, double nu,
    const CoxOptions& opt = {}) {
  if (!(nu > 0.0)) throw input_error("cox_changepoint_fit: nu must be > 0");
  if (samples.empty()) throw estimation_error("cox_changepoint_fit: empty dataset");

  CoxData data;
  data.p = 2;
  for (const auto& s : samples) {
    double a = static_cast<double>(s.arm);
    if (s.time <= nu) {
      data.start.push_back(0.0);
      data.stop.push_back(s.time);
      data.status.push_back(s.status);
      data.x.insert(data.x.end(), {a, 0.0});
    } else {
      data.start.push_back(0.0);
      data.stop.push_back(nu);
      data.status.push_back(0);
      data.x.insert(data.x.end(), {a, 0.0});
      data.start.push_back(nu);
      data.stop.push_back(s.time);
      data.status.push_back(s.status);
      data.x.insert(data.x.end(), {0.0, a});
    }
  }

  detail::CoxWork work(data);
  if (work.event_times_desc.empty())
    throw estimation_error("cox_changepoint_fit: no events in the data");
  auto ev0 = detail::cox_eval(data, work, {0.0, 0.0});
  double diag_scale = 1.0 + std::max(ev0.info(0, 0), ev0.info(1, 1));
  bool id1 = ev0.info(0, 0) > 1e-10 * diag_scale;
  bool id2 = ev0.info(1, 1) > 1e-10 * diag_scale;

  ChangePointCoxFit cp;
  cp.nu = nu;
  cp.beta1_identified = id1;
  cp.beta2_identified = id2;
  if (!id1 && !id2)
    throw estimation_error(
        "cox_changepoint_fit: neither coefficient identified");

  if (id1 && id2) {
    CoxFit fit = cox_fit_data(data, opt);
    cp.beta1 = fit.beta[0];
    cp.beta2 = fit.beta[1];
    cp.se1 = fit.se[0];
    cp.se2 = fit.se[1];
    cp.baseline_cumhaz = fit.baseline_cumhaz;
    cp.loglik = fit.loglik;
    cp.n_iter = fit.n_iter;
    return cp;
  }

  // one side degenerate: refit the identified column alone
  std::size_t keep = id1 ? 0 : 1;
  CoxData red;
  red.p = 1;
  red.start = data.start;
  red.stop = data.stop;
  red.status = data.status;
  red.x.reserve(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) red.x.push_back(data.x[i * 2 + keep]);
  CoxFit fit = cox_fit_data(red, opt);
  if (id1) {
    cp.beta1 = fit.beta[0];
    cp.se1 = fit.se[0];
  } else {
    cp.beta2 = fit.beta[0];
    cp.se2 = fit.se[0];
  }
  cp.baseline_cumhaz = fit.baseline_cumhaz;
  cp.loglik = fit.loglik;
  cp.n_iter = fit.n_iter;
  return cp;
}

}  // namespace hazardlens
