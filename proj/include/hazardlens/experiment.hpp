#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hazardlens/aalen.hpp"
#include "hazardlens/causal_hr.hpp"
#include "hazardlens/censoring.hpp"
#include "hazardlens/config.hpp"
#include "hazardlens/coupling.hpp"
#include "hazardlens/cox.hpp"
#include "hazardlens/csv.hpp"
#include "hazardlens/errors.hpp"
#include "hazardlens/frailty.hpp"
#include "hazardlens/kaplan_meier.hpp"
#include "hazardlens/kendall.hpp"
#include "hazardlens/rng.hpp"
#include "hazardlens/stats_util.hpp"
#include "hazardlens/svg.hpp"

namespace hazardlens {

using ordered_json = nlohmann::ordered_json;

/// Conditional hazard-ratio curve for a fitted change-point model, with the
/// coupling strength given as Kendall's tau: theta = 2 tau / (1 - tau)
/// plugged into the Gamma closed form on the supplied baseline.
inline std::vector<double> fig9_curve(double beta1, double beta2, double nu,
                                      const CumulativeHazard& baseline,
                                      double tau,
                                      const std::vector<double>& tgrid) {
  double theta = theta_from_tau(tau);
  MarginalModel m{beta1, beta2, nu, baseline};
  std::vector<double> out;
  out.reserve(tgrid.size());
  for (double t : tgrid) out.push_back(hrz_gamma_closed(m, theta, t));
  return out;
}

namespace detail {

struct GeneratedData {
  std::vector<SurvivalSample> samples;  // true event times, status 1
  std::vector<double> z, t0, t1;        // extension columns when available
  std::vector<PotentialOutcomePair> pairs;
  bool has_pairs = false;
};

inline MarginalModel marginal_from_config(const ExperimentConfig& cfg) {
  return MarginalModel{cfg.beta1, cfg.beta2, cfg.nu,
                       CumulativeHazard::constant_rate(cfg.lambda0)};
}

inline GeneratedData generate_dgp(const ExperimentConfig& cfg, SeedSpec stream) {
  GeneratedData g;
  RngStream rng(stream);
  auto push_observed = [&](const PotentialOutcomePair& p, std::size_t i) {
    SurvivalSample s;
    s.id = std::to_string(i + 1);
    s.time = p.t_obs;
    s.status = 1;
    s.arm = p.a;
    g.samples.push_back(std::move(s));
    g.z.push_back(p.z);
    g.t0.push_back(p.t0);
    g.t1.push_back(p.t1);
  };

  if (cfg.dgp == "changepoint-frailty") {
    if (!cfg.frailty) throw input_error(cfg.name + ": dgp needs a frailty spec");
    if (std::isnan(cfg.beta1)) throw input_error(cfg.name + ": dgp needs beta1");
    MarginalModel m = marginal_from_config(cfg);
    for (std::size_t i = 0; i < cfg.n; ++i) {
      auto p = draw_conditional_pair(m, *cfg.frailty, rng);
      g.pairs.push_back(p);
      push_observed(p, i);
    }
    g.has_pairs = true;
  } else if (cfg.dgp == "plain-cox") {
    double beta = std::isnan(cfg.beta) ? cfg.beta1 : cfg.beta;
    if (std::isnan(beta)) throw input_error(cfg.name + ": dgp needs beta");
    auto baseline = CumulativeHazard::constant_rate(cfg.lambda0);
    for (std::size_t i = 0; i < cfg.n; ++i) {
      SurvivalSample s;
      s.id = std::to_string(i + 1);
      s.arm = rng.bernoulli(0.5) ? 1 : 0;
      s.time = baseline.invert(std::exp(-s.arm * beta) * rng.exponential());
      s.status = 1;
      g.samples.push_back(std::move(s));
    }
  } else if (cfg.dgp == "gamma-shared") {
    if (std::isnan(cfg.beta) || std::isnan(cfg.theta))
      throw input_error(cfg.name + ": dgp needs beta and theta");
    g.pairs = gen_gamma_shared(cfg.beta, cfg.theta, cfg.n, stream);
    for (std::size_t i = 0; i < g.pairs.size(); ++i) push_observed(g.pairs[i], i);
    g.has_pairs = true;
  } else if (cfg.dgp == "two-level") {
    if (std::isnan(cfg.beta)) throw input_error(cfg.name + ": dgp needs beta");
    g.pairs = gen_two_level(cfg.beta, CumulativeHazard::constant_rate(cfg.lambda0),
                            cfg.n, stream);
    for (std::size_t i = 0; i < g.pairs.size(); ++i) push_observed(g.pairs[i], i);
    g.has_pairs = true;
  } else if (cfg.dgp == "shared-additive") {
    if (std::isnan(cfg.alpha) || std::isnan(cfg.beta))
      throw input_error(cfg.name + ": dgp needs alpha and beta");
    g.pairs = gen_shared_additive(cfg.alpha, cfg.beta, cfg.n, stream);
    for (std::size_t i = 0; i < g.pairs.size(); ++i) push_observed(g.pairs[i], i);
    g.has_pairs = true;
  } else {
    throw input_error(cfg.name + ": unknown dgp '" + cfg.dgp + "'");
  }
  return g;
}

struct ReplicateResult {
  ordered_json entry;
  std::map<std::string, double> numbers;
  bool failed = false;
};

inline ReplicateResult run_replicate(const ExperimentConfig& cfg, int rep,
                                     Dataset* dataset_out,
                                     std::vector<PotentialOutcomePair>* pairs_out,
                                     std::map<std::string, std::string>* curves_out) {
  ReplicateResult res;
  res.entry["replicate"] = rep;
  SeedSpec base{cfg.seed, static_cast<std::uint64_t>(rep)};

  GeneratedData g = generate_dgp(cfg, base.substream(0));
  RngStream censor_rng(base.substream(1));
  auto observed = apply_censoring(g.samples, cfg.censoring, censor_rng);
  double cfrac = censored_fraction(observed);
  res.entry["censoring_fraction"] = cfrac;
  res.numbers["censoring_fraction"] = cfrac;

  if (dataset_out) {
    dataset_out->samples = observed;
    dataset_out->n_covariates = 0;
    dataset_out->z = g.z;
    dataset_out->t0 = g.t0;
    dataset_out->t1 = g.t1;
  }
  if (pairs_out && g.has_pairs) *pairs_out = g.pairs;

  ordered_json fits = ordered_json::object();
  for (const auto& est : cfg.estimators) {
    try {
      if (est == "km") {
        for (int arm = 0; arm <= 1; ++arm) {
          auto km = kaplan_meier(observed, arm);
          std::string key = "km_arm" + std::to_string(arm);
          fits[key]["n"] = km.n;
          fits[key]["events"] = km.event_times.size();
          if (curves_out) {
            std::vector<std::vector<double>> rows;
            for (std::size_t k = 0; k < km.event_times.size(); ++k) {
              double se = std::sqrt(km.variance[k]);
              rows.push_back({km.event_times[k], km.surv_at_event[k],
                              std::max(0.0, km.surv_at_event[k] - 1.96 * se),
                              std::min(1.0, km.surv_at_event[k] + 1.96 * se)});
            }
            (*curves_out)[key + ".csv"] =
                table_csv_string({"t", "estimate", "lo", "hi"}, rows);
          }
        }
      } else if (est == "cox") {
        auto fit = cox_fit(observed, CovariateSelector{});
        fits["cox"]["beta"] = fit.beta[0];
        fits["cox"]["se"] = fit.se[0];
        fits["cox"]["loglik"] = fit.loglik;
        fits["cox"]["n_iter"] = fit.n_iter;
        res.numbers["cox.beta"] = fit.beta[0];
        res.numbers["cox.se"] = fit.se[0];
      } else if (est == "coxcp") {
        double nu = std::isnan(cfg.fit_nu) ? cfg.nu : cfg.fit_nu;
        if (!std::isfinite(nu))
          throw input_error(cfg.name + ": coxcp needs fit_nu");
        auto fit = cox_changepoint_fit(observed, nu);
        fits["coxcp"]["nu"] = nu;
        fits["coxcp"]["beta1"] = fit.beta1;
        fits["coxcp"]["se1"] = fit.se1;
        fits["coxcp"]["beta2"] = fit.beta2;
        fits["coxcp"]["se2"] = fit.se2;
        fits["coxcp"]["beta1_identified"] = fit.beta1_identified;
        fits["coxcp"]["beta2_identified"] = fit.beta2_identified;
        fits["coxcp"]["loglik"] = fit.loglik;
        if (fit.beta1_identified) {
          res.numbers["coxcp.beta1"] = fit.beta1;
          res.numbers["coxcp.se1"] = fit.se1;
        }
        if (fit.beta2_identified) {
          res.numbers["coxcp.beta2"] = fit.beta2;
          res.numbers["coxcp.se2"] = fit.se2;
        }
        if (curves_out) {
          std::vector<std::vector<double>> rows;
          const auto& bl = fit.baseline_cumhaz;
          for (std::size_t k = 0; k < bl.jump_times().size(); ++k)
            rows.push_back({bl.jump_times()[k], bl.values()[k + 1]});
          (*curves_out)["baseline_cumhaz.csv"] =
              table_csv_string({"t", "value"}, rows);
        }
      } else if (est == "aalen") {
        auto fit = aalen_fit(observed, CovariateSelector{});
        auto ce = constant_effect(fit, 1, 0.0,
                                  std::numeric_limits<double>::infinity(), 1000,
                                  base.substream(2));
        fits["aalen"]["psi"] = ce.psi;
        fits["aalen"]["se"] = ce.se;
        fits["aalen"]["constancy_p"] = ce.p_value;
        fits["aalen"]["n_times"] = fit.times.size();
        res.numbers["aalen.psi"] = ce.psi;
        res.numbers["aalen.se"] = ce.se;
        if (curves_out) {
          std::vector<std::vector<double>> rows;
          for (std::size_t k = 0; k < fit.times.size(); ++k) {
            double se_a = std::sqrt(fit.var(k, 1));
            rows.push_back({fit.times[k], fit.coef(k, 1),
                            fit.coef(k, 1) - 1.96 * se_a,
                            fit.coef(k, 1) + 1.96 * se_a});
          }
          (*curves_out)["aalen_arm.csv"] =
              table_csv_string({"t", "estimate", "lo", "hi"}, rows);
          std::vector<std::vector<double>> rows0;
          for (std::size_t k = 0; k < fit.times.size(); ++k)
            rows0.push_back({fit.times[k], fit.coef(k, 0)});
          (*curves_out)["aalen_intercept.csv"] =
              table_csv_string({"t", "value"}, rows0);
        }
      } else {
        throw input_error(cfg.name + ": unknown estimator '" + est + "'");
      }
    } catch (const estimation_error& ex) {
      fits[est]["error"] = ex.what();
      res.failed = true;
    }
  }
  res.entry["fits"] = std::move(fits);
  return res;
}

}  // namespace detail

struct ExperimentReport {
  ordered_json report;
  std::map<std::string, std::string> files;  // name -> contents (already written)
};

/// Runs an experiment and writes report.json plus dataset/curve CSVs into
/// out_dir. Deterministic for a fixed config: replicate r always consumes
/// the streams derived from (seed, r), independent of thread count.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                       const std::string& out_dir,
                                       bool write_svg = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  ExperimentReport out;
  ordered_json& rep = out.report;
  rep["name"] = cfg.name;
  rep["mode"] = cfg.mode == ExperimentConfig::Mode::dataset ? "dataset" : "curves";
  rep["seed"] = cfg.seed;

  auto add_curve_file = [&](const std::string& fname, const std::string& text) {
    out.files[fname] = text;
    write_text_file(out_dir + "/" + fname, text);
  };

  if (cfg.mode == ExperimentConfig::Mode::curves) {
    if (cfg.tgrid.empty()) throw input_error(cfg.name + ": curves need a tgrid");
    if (cfg.curves.empty()) throw input_error(cfg.name + ": no curves requested");
    ordered_json files_json = ordered_json::array();
    std::vector<SvgSeries> svg_series;
    for (const auto& kind : cfg.curves) {
      if (kind == "hrz") {
        if (!cfg.frailty || std::isnan(cfg.beta1))
          throw input_error(cfg.name + ": hrz needs frailty and beta1");
        MarginalModel m = detail::marginal_from_config(cfg);
        auto vals = hrz_curve(m, *cfg.frailty, cfg.tgrid);
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < cfg.tgrid.size(); ++k)
          rows.push_back({cfg.tgrid[k], vals[k]});
        add_curve_file("hrz.csv", table_csv_string({"t", "value"}, rows));
        files_json.push_back("hrz.csv");
        svg_series.push_back({"HR_Z(t)", cfg.tgrid, vals});
      } else if (kind == "hrz-gamma") {
        if (std::isnan(cfg.beta1) || std::isnan(cfg.tau))
          throw input_error(cfg.name + ": hrz-gamma needs beta1 and tau");
        auto vals = fig9_curve(cfg.beta1, cfg.beta2, cfg.nu,
                               CumulativeHazard::constant_rate(cfg.lambda0),
                               cfg.tau, cfg.tgrid);
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < cfg.tgrid.size(); ++k)
          rows.push_back({cfg.tgrid[k], vals[k]});
        add_curve_file("hrz.csv", table_csv_string({"t", "value"}, rows));
        files_json.push_back("hrz.csv");
        svg_series.push_back({"HR_Z(t)", cfg.tgrid, vals});
      } else if (kind == "selection") {
        if (!cfg.frailty || std::isnan(cfg.beta1))
          throw input_error(cfg.name + ": selection needs frailty and beta1");
        MarginalModel m = detail::marginal_from_config(cfg);
        auto sc = selection_curve(m, *cfg.frailty, cfg.tgrid);
        auto emit = [&](const std::string& fname, const std::vector<double>& v,
                        const std::string& label) {
          std::vector<std::vector<double>> rows;
          for (std::size_t k = 0; k < sc.t.size(); ++k)
            rows.push_back({sc.t[k], v[k]});
          add_curve_file(fname, table_csv_string({"t", "value"}, rows));
          files_json.push_back(fname);
          svg_series.push_back({label, sc.t, v});
        };
        emit("selection_a0.csv", sc.mean_control, "E(Z|T>t,A=0)");
        emit("selection_a1.csv", sc.mean_treated, "E(Z|T>t,A=1)");
        emit("selection_ratio.csv", sc.ratio, "ratio");
      } else if (kind == "hr-closed") {
        if (std::isnan(cfg.beta))
          throw input_error(cfg.name + ": hr-closed needs beta");
        std::vector<double> taus = cfg.taus;
        if (taus.empty() && !std::isnan(cfg.tau)) taus.push_back(cfg.tau);
        if (taus.empty()) throw input_error(cfg.name + ": hr-closed needs taus");
        for (double tau : taus) {
          double theta = theta_from_tau(tau);
          std::vector<std::vector<double>> rows;
          std::vector<double> vals;
          for (double t : cfg.tgrid) {
            double v = causal_hr_closed(cfg.beta, theta, cfg.lambda0 * t);
            rows.push_back({t, v});
            vals.push_back(v);
          }
          std::string fname = "hr_tau_" + detail::format_double(tau) + ".csv";
          add_curve_file(fname, table_csv_string({"t", "value"}, rows));
          files_json.push_back(fname);
          svg_series.push_back({"tau=" + detail::format_double(tau), cfg.tgrid, vals});
        }
      } else {
        throw input_error(cfg.name + ": unknown curve kind '" + kind + "'");
      }
    }
    rep["curve_files"] = files_json;
    if (write_svg)
      add_curve_file("curves.svg", svg_line_plot(cfg.name, svg_series));
    write_text_file(out_dir + "/report.json", rep.dump(2) + "\n");
    out.files["report.json"] = rep.dump(2) + "\n";
    return out;
  }

  // dataset mode
  if (cfg.n < 1) throw input_error(cfg.name + ": dataset experiment needs n >= 1");
  if (cfg.dgp.empty()) throw input_error(cfg.name + ": dataset experiment needs a dgp");

  std::vector<detail::ReplicateResult> results(static_cast<std::size_t>(cfg.replicates));
  Dataset dataset0;
  std::vector<PotentialOutcomePair> pairs0;
  std::map<std::string, std::string> curves0;

  auto work = [&](int r) {
    results[static_cast<std::size_t>(r)] = detail::run_replicate(
        cfg, r, r == 0 ? &dataset0 : nullptr, r == 0 ? &pairs0 : nullptr,
        r == 0 ? &curves0 : nullptr);
  };
  if (cfg.threads > 1 && cfg.replicates > 1) {
    std::vector<std::future<void>> futs;
    for (int w = 0; w < cfg.threads; ++w)
      futs.push_back(std::async(std::launch::async, [&, w]() {
        for (int r = w; r < cfg.replicates; r += cfg.threads) work(r);
      }));
    for (auto& f : futs) f.get();
  } else {
    for (int r = 0; r < cfg.replicates; ++r) work(r);
  }

  bool all_failed = true;
  for (const auto& r : results) all_failed = all_failed && r.failed;
  if (all_failed && !cfg.estimators.empty())
    throw estimation_error(cfg.name + ": all replicates failed");

  ordered_json reps = ordered_json::array();
  std::map<std::string, std::vector<double>> agg_values;
  for (const auto& r : results) {
    reps.push_back(r.entry);
    for (const auto& [k, v] : r.numbers) agg_values[k].push_back(v);
  }
  rep["replicates"] = std::move(reps);

  ordered_json agg = ordered_json::object();
  std::map<std::string, double> truths;
  if (cfg.dgp == "changepoint-frailty") {
    truths["coxcp.beta1"] = cfg.beta1;
    truths["coxcp.beta2"] = cfg.beta2;
  }
  double beta_truth = std::isnan(cfg.beta) ? cfg.beta1 : cfg.beta;
  if ((cfg.dgp == "plain-cox" || cfg.dgp == "gamma-shared" ||
       cfg.dgp == "two-level") &&
      !std::isnan(beta_truth))
    truths["cox.beta"] = beta_truth;

  for (const auto& [key, vals] : agg_values) {
    agg[key]["mean"] = mean_of(vals);
    agg[key]["sd"] = sd_of(vals);
    agg[key]["n"] = vals.size();
    auto tr = truths.find(key);
    if (tr != truths.end()) {
      agg[key]["truth"] = tr->second;
      // coverage of truth by est +- 1.96 se, taken across replicates
      auto se_it = agg_values.find(key.substr(0, key.find('.')) + "." +
                                   (key == "coxcp.beta1" ? "se1"
                                    : key == "coxcp.beta2" ? "se2" : "se"));
      if (se_it != agg_values.end() && se_it->second.size() == vals.size()) {
        int covered = 0;
        for (std::size_t i = 0; i < vals.size(); ++i)
          if (std::fabs(vals[i] - tr->second) <= 1.96 * se_it->second[i])
            ++covered;
        agg[key]["coverage95"] =
            static_cast<double>(covered) / static_cast<double>(vals.size());
      }
    }
  }
  rep["aggregate"] = std::move(agg);

  if (cfg.emit_dataset) {
    std::string csv = dataset_csv_string(dataset0);
    out.files["dataset.csv"] = csv;
    write_text_file(out_dir + "/dataset.csv", csv);
  }
  if (cfg.emit_pairs && !pairs0.empty()) {
    write_pairs_csv(out_dir + "/pairs.csv", pairs0);
    out.files["pairs.csv"] = "";
  }
  for (const auto& [fname, text] : curves0) add_curve_file(fname, text);
  if (write_svg && curves0.count("aalen_arm.csv")) {
    // nothing fancy; datasets get their curves as CSV
  }

  std::string rep_text = rep.dump(2) + "\n";
  write_text_file(out_dir + "/report.json", rep_text);
  out.files["report.json"] = rep_text;
  return out;
}

}  // namespace hazardlens
