#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hazardlens/aalen.hpp"
#include "hazardlens/causal_hr.hpp"
#include "hazardlens/config.hpp"
#include "hazardlens/cox.hpp"
#include "hazardlens/csv.hpp"
#include "hazardlens/errors.hpp"
#include "hazardlens/experiment.hpp"
#include "hazardlens/kaplan_meier.hpp"
#include "hazardlens/kendall.hpp"
#include "hazardlens/rmst.hpp"
#include "hazardlens/rr_curve.hpp"
#include "hazardlens/sensitivity.hpp"
#include "hazardlens/verify.hpp"

namespace hazardlens {

// exit-code contract: 0 success, 1 verification failure, 2 usage/input
// error, 3 runtime/numerical error
namespace exit_code {
constexpr int ok = 0;
constexpr int verify_failed = 1;
constexpr int usage = 2;
constexpr int runtime = 3;
}  // namespace exit_code

namespace detail {

inline std::vector<double> parse_grid_spec(const std::string& spec) {
  auto c1 = spec.find(':');
  auto c2 = spec.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw input_error("grid must be start:stop:step, got '" + spec + "'");
  try {
    double a = std::stod(spec.substr(0, c1));
    double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    double s = std::stod(spec.substr(c2 + 1));
    return make_grid(a, b, s);
  } catch (const std::domain_error& e) {
    throw input_error(std::string("bad grid: ") + e.what());
  } catch (...) {
    throw input_error("grid must be numeric start:stop:step, got '" + spec + "'");
  }
}

inline std::vector<double> parse_double_list(const std::string& spec) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    std::string tok = spec.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) {
      try {
        out.push_back(std::stod(tok));
      } catch (...) {
        throw input_error("expected a number in list, got '" + tok + "'");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw input_error("empty numeric list");
  return out;
}

inline CovariateSelector parse_covariates(const std::string& spec,
                                          std::size_t n_covariates) {
  CovariateSelector sel;
  if (spec == "arm") return sel;
  sel.include_arm = false;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    std::string tok = spec.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (tok == "arm") {
      sel.include_arm = true;
    } else if (!tok.empty()) {
      long idx = 0;
      try {
        idx = std::stol(tok);
      } catch (...) {
        throw input_error("bad covariate token '" + tok + "' (want arm or 1-based index)");
      }
      if (idx < 1 || static_cast<std::size_t>(idx) > n_covariates)
        throw input_error("covariate index " + tok + " out of range (dataset has " +
                          std::to_string(n_covariates) + ")");
      sel.covariate_indices.push_back(static_cast<std::size_t>(idx - 1));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (sel.dim() == 0) throw input_error("no covariates selected");
  return sel;
}

inline FrailtySpec parse_frailty_flag(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw input_error("frailty must be gamma:<theta> or discrete:z=p,z=p");
  std::string kind = spec.substr(0, colon), body = spec.substr(colon + 1);
  try {
    if (kind == "gamma") return FrailtySpec::gamma(std::stod(body));
    if (kind == "discrete") {
      std::vector<std::pair<double, double>> atoms;
      std::size_t start = 0;
      while (start <= body.size()) {
        auto comma = body.find(',', start);
        std::string tok = body.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw input_error("atom must be z=p");
        atoms.emplace_back(std::stod(tok.substr(0, eq)), std::stod(tok.substr(eq + 1)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return FrailtySpec::discrete(atoms);
    }
  } catch (const input_error&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw input_error(std::string("bad frailty spec: ") + e.what());
  } catch (...) {
    throw input_error("bad frailty spec '" + spec + "'");
  }
  throw input_error("frailty kind must be gamma or discrete");
}

inline void write_json(const std::string& path, const ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline ordered_json cox_fit_json(const CoxFit& fit) {
  ordered_json j;
  j["model"] = "cox";
  j["beta"] = fit.beta;
  j["se"] = fit.se;
  j["loglik"] = fit.loglik;
  j["n_iter"] = fit.n_iter;
  j["converged"] = fit.converged;
  return j;
}

inline std::vector<std::vector<double>> step_cum_rows(const StepFunction& f) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < f.jump_times().size(); ++k)
    rows.push_back({f.jump_times()[k], f.values()[k + 1]});
  return rows;
}

inline std::vector<std::vector<double>> km_rows(const KmCurve& km) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < km.event_times.size(); ++k) {
    double se = std::sqrt(km.variance[k]);
    rows.push_back({km.event_times[k], km.surv_at_event[k],
                    std::max(0.0, km.surv_at_event[k] - 1.96 * se),
                    std::min(1.0, km.surv_at_event[k] + 1.96 * se)});
  }
  return rows;
}

}  // namespace detail

struct CliOut {
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
};

/// Parses and executes one CLI invocation. args excludes the program name.
/// Returns the process exit code per the contract above.
inline int run_cli(const std::vector<std::string>& args, CliOut io = {}) {
  CLI::App app{"hazard-ratio estimation, frailty transforms and "
               "principal-stratum sensitivity analysis"};
  app.require_subcommand(1);

  // shared option storage
  std::string config_name, out_dir, data_path, model, covariates = "arm";
  std::string rr_grid, tgrid_spec, sr_spec, tau_list, only_filter, format = "summary";
  std::string frailty_spec, curve_kind;
  std::uint64_t seed = 20240801;
  bool seed_given = false;
  int replicates = -1;
  long long n_override = -1;
  int threads = 1, n_boot = 1000;
  double nu = std::numeric_limits<double>::quiet_NaN();
  double level = 0.95, horizon = 0.0, tol_scale = 1.0;
  double obs_hr_const = std::numeric_limits<double>::quiet_NaN();
  double pi_const = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double beta1 = std::numeric_limits<double>::quiet_NaN();
  double beta2 = 0.0, lambda0 = 1.0, tau_single = std::numeric_limits<double>::quiet_NaN();
  bool svg = false;

  auto* sim = app.add_subcommand("simulate", "run a configured experiment");
  sim->add_option("--config", config_name, "bundled config name or file path")
      ->required()
      ->envname("HAZARDLENS_CONFIG");
  sim->add_option("--out", out_dir, "output directory")->required()->envname("HAZARDLENS_OUT");
  sim->add_option("--seed", seed, "master seed override")
      ->envname("HAZARDLENS_SEED")
      ->trigger_on_parse()
      ->each([&](const std::string&) { seed_given = true; });
  sim->add_option("--replicates", replicates, "replicate count override")
      ->check(CLI::PositiveNumber);
  sim->add_option("--n", n_override, "sample size override")->check(CLI::PositiveNumber);
  sim->add_option("--threads", threads, "worker threads for replicates")
      ->envname("HAZARDLENS_THREADS")
      ->check(CLI::PositiveNumber);
  sim->add_flag("--svg", svg, "also write an SVG plot for curve experiments");

  auto* fit = app.add_subcommand("fit", "fit estimators to a dataset CSV");
  fit->add_option("--data", data_path, "dataset CSV")->required();
  fit->add_option("--model", model, "estimator")
      ->required()
      ->check(CLI::IsMember({"km", "cox", "coxcp", "aalen"}));
  fit->add_option("--out", out_dir, "output directory")->required()->envname("HAZARDLENS_OUT");
  fit->add_option("--nu", nu, "change point for coxcp");
  fit->add_option("--covariates", covariates,
                  "design columns: arm and/or 1-based cov indices, comma-separated");
  fit->add_option("--rr-grid", rr_grid, "emit the relative-risk curve on start:stop:step");
  fit->add_option("--boot", n_boot, "bootstrap replicates for bands")
      ->envname("HAZARDLENS_BOOT");
  fit->add_option("--level", level, "confidence level")->envname("HAZARDLENS_LEVEL");
  fit->add_option("--seed", seed, "seed for resampling")->envname("HAZARDLENS_SEED");
  fit->add_option("--format", format, "stdout report style")
      ->check(CLI::IsMember({"summary", "json", "csv"}))
      ->envname("HAZARDLENS_FORMAT");

  auto* curves = app.add_subcommand("curves", "closed-form curve displays");
  curves->add_option("--kind", curve_kind, "curve family")
      ->required()
      ->check(CLI::IsMember({"hrz", "selection", "hr-closed", "fig9"}));
  curves->add_option("--out", out_dir, "output directory")->required()->envname("HAZARDLENS_OUT");
  curves->add_option("--tgrid", tgrid_spec, "grid start:stop:step")->required();
  curves->add_option("--frailty", frailty_spec, "gamma:<theta> or discrete:z=p,z=p");
  curves->add_option("--beta", beta, "log hazard ratio");
  curves->add_option("--beta1", beta1, "log hazard ratio before nu");
  curves->add_option("--beta2", beta2, "log hazard ratio after nu");
  curves->add_option("--nu", nu, "change point");
  curves->add_option("--lambda0", lambda0, "constant baseline hazard rate");
  curves->add_option("--tau", tau_single, "Kendall tau for fig9");
  curves->add_option("--taus", tau_list, "comma list of Kendall taus for hr-closed");
  curves->add_flag("--svg", svg, "also write an SVG plot");

  auto* sens = app.add_subcommand("sensitivity",
                                  "causal hazard-ratio sensitivity analysis");
  sens->add_option("--data", data_path, "dataset CSV (fits the observed model)");
  sens->add_option("--obs-hr", obs_hr_const, "synthetic constant observed HR");
  sens->add_option("--pi", pi_const, "synthetic constant pi(t)");
  sens->add_option("--tau", tau_list, "comma list of taus (coupling route)");
  sens->add_option("--sr", sr_spec, "SR spec (const:v | piecewise:t=v,.. | table:csv)");
  sens->add_option("--tgrid", tgrid_spec, "grid start:stop:step");
  sens->add_option("--out", out_dir, "output directory")->required()->envname("HAZARDLENS_OUT");
  sens->add_option("--seed", seed, "seed")->envname("HAZARDLENS_SEED");
  sens->add_flag("--svg", svg, "also write an SVG plot");

  auto* rm = app.add_subcommand("rmst", "restricted mean survival / time lost");
  rm->add_option("--data", data_path, "dataset CSV")->required();
  rm->add_option("--horizon", horizon, "restriction time")->required();
  rm->add_option("--level", level, "confidence level")->envname("HAZARDLENS_LEVEL");
  rm->add_option("--out", out_dir, "output directory")->required()->envname("HAZARDLENS_OUT");
  rm->add_option("--format", format, "stdout report style")
      ->check(CLI::IsMember({"summary", "json", "csv"}))
      ->envname("HAZARDLENS_FORMAT");

  auto* ver = app.add_subcommand("verify", "run the oracle cross-check suite");
  ver->add_option("--only", only_filter, "substring filter on check names");
  ver->add_option("--tol-scale", tol_scale, "tolerance multiplier (0 = negative control)")
      ->envname("HAZARDLENS_TOL_SCALE");
  ver->add_option("--seed", seed, "seed")->envname("HAZARDLENS_SEED");

  std::vector<const char*> argv;
  argv.push_back("hazardlens");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, *io.out, *io.err);
    return exit_code::usage;
  }

  try {
    namespace fs = std::filesystem;

    if (*sim) {
      ExperimentConfig cfg = load_config(config_name);
      if (seed_given) cfg.seed = seed;
      if (replicates > 0) cfg.replicates = replicates;
      if (n_override > 0) cfg.n = static_cast<std::size_t>(n_override);
      cfg.threads = threads;
      run_experiment(cfg, out_dir, svg);
      *io.out << "wrote " << out_dir << "/report.json\n";
      return exit_code::ok;
    }

    if (*curves) {
      ExperimentConfig cfg;
      cfg.mode = ExperimentConfig::Mode::curves;
      cfg.name = curve_kind;
      cfg.curves = {curve_kind == "fig9" ? "hrz-gamma" : curve_kind};
      cfg.tgrid = detail::parse_grid_spec(tgrid_spec);
      if (!frailty_spec.empty()) cfg.frailty = detail::parse_frailty_flag(frailty_spec);
      cfg.beta = beta;
      cfg.beta1 = beta1;
      cfg.beta2 = beta2;
      cfg.nu = std::isnan(nu) ? std::numeric_limits<double>::infinity() : nu;
      cfg.lambda0 = lambda0;
      cfg.tau = tau_single;
      if (!tau_list.empty()) cfg.taus = detail::parse_double_list(tau_list);
      run_experiment(cfg, out_dir, svg);
      *io.out << "wrote " << out_dir << "/report.json\n";
      return exit_code::ok;
    }

    if (*fit) {
      Dataset ds = read_dataset_csv(data_path);
      fs::create_directories(out_dir);
      ordered_json j;

      if (model == "km") {
        auto km_all = kaplan_meier(ds.samples);
        write_table_csv(out_dir + "/km_all.csv", {"t", "estimate", "lo", "hi"},
                        detail::km_rows(km_all));
        j["model"] = "km";
        j["n"] = km_all.n;
        j["events"] = km_all.event_times.size();
        for (int arm = 0; arm <= 1; ++arm) {
          bool present = false;
          for (const auto& s : ds.samples) present = present || s.arm == arm;
          if (!present) continue;
          auto km = kaplan_meier(ds.samples, arm);
          std::string name = "km_arm" + std::to_string(arm);
          write_table_csv(out_dir + "/" + name + ".csv",
                          {"t", "estimate", "lo", "hi"}, detail::km_rows(km));
          j[name]["n"] = km.n;
          j[name]["events"] = km.event_times.size();
        }
      } else if (model == "cox") {
        auto sel = detail::parse_covariates(covariates, ds.n_covariates);
        auto cfit = cox_fit(ds.samples, sel);
        j = detail::cox_fit_json(cfit);
        write_table_csv(out_dir + "/baseline_cumhaz.csv", {"t", "value"},
                        detail::step_cum_rows(cfit.baseline_cumhaz));
        if (!rr_grid.empty()) {
          auto grid = detail::parse_grid_spec(rr_grid);
          auto rr = rr_curve(ds.samples, cfit, grid, level, n_boot, SeedSpec{seed, 0});
          std::vector<std::vector<double>> rows;
          for (std::size_t k = 0; k < rr.times.size(); ++k)
            rows.push_back({rr.times[k], rr.estimate[k], rr.lo[k], rr.hi[k],
                            rr.lo_unif[k], rr.hi_unif[k]});
          write_table_csv(out_dir + "/rr_curve.csv",
                          {"t", "estimate", "lo", "hi", "lo_unif", "hi_unif"}, rows);
          j["rr_curve"] = "rr_curve.csv";
          j["rr_boot_used"] = rr.n_boot_used;
        }
      } else if (model == "coxcp") {
        if (std::isnan(nu)) throw input_error("fit --model coxcp requires --nu");
        auto cfit = cox_changepoint_fit(ds.samples, nu);
        j["model"] = "coxcp";
        j["nu"] = cfit.nu;
        j["beta1"] = cfit.beta1;
        j["se1"] = cfit.se1;
        j["beta1_identified"] = cfit.beta1_identified;
        j["beta2"] = cfit.beta2;
        j["se2"] = cfit.se2;
        j["beta2_identified"] = cfit.beta2_identified;
        j["loglik"] = cfit.loglik;
        j["n_iter"] = cfit.n_iter;
        write_table_csv(out_dir + "/baseline_cumhaz.csv", {"t", "value"},
                        detail::step_cum_rows(cfit.baseline_cumhaz));
      } else if (model == "aalen") {
        auto sel = detail::parse_covariates(covariates, ds.n_covariates);
        auto afit = aalen_fit(ds.samples, sel);
        auto ce = constant_effect(afit, 1, 0.0,
                                  std::numeric_limits<double>::infinity(), 1000,
                                  SeedSpec{seed, 0});
        j["model"] = "aalen";
        j["columns"] = afit.p;
        j["n_times"] = afit.times.size();
        j["truncated"] = afit.truncated;
        j["psi"] = ce.psi;
        j["se"] = ce.se;
        j["constancy_p"] = ce.p_value;
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < afit.times.size(); ++k) {
          std::vector<double> row{afit.times[k]};
          for (std::size_t c = 0; c < afit.p; ++c) {
            row.push_back(afit.coef(k, c));
            row.push_back(std::sqrt(afit.var(k, c)));
          }
          rows.push_back(std::move(row));
        }
        std::vector<std::string> cols{"t"};
        for (std::size_t c = 0; c < afit.p; ++c) {
          cols.push_back("b" + std::to_string(c));
          cols.push_back("se" + std::to_string(c));
        }
        write_table_csv(out_dir + "/aalen_cumcoef.csv", cols, rows);
      }

      detail::write_json(out_dir + "/fit.json", j);
      if (format == "json")
        *io.out << j.dump(2) << "\n";
      else
        *io.out << "wrote " << out_dir << "/fit.json\n";
      return exit_code::ok;
    }

    if (*sens) {
      bool have_tau = !tau_list.empty(), have_sr = !sr_spec.empty();
      if (have_tau == have_sr)
        throw input_error("sensitivity: provide exactly one of --tau / --sr");
      fs::create_directories(out_dir);

      std::optional<CoxFit> cfit;
      std::function<double(double)> surv0, surv1, obs_hr;
      std::vector<double> grid;

      if (!data_path.empty()) {
        Dataset ds = read_dataset_csv(data_path);
        cfit = cox_fit(ds.samples, CovariateSelector{});
        auto km0 = kaplan_meier(ds.samples, 0);
        auto km1 = kaplan_meier(ds.samples, 1);
        StepFunction s0 = km0.survival, s1 = km1.survival;
        surv0 = [s0](double t) { return s0(t); };
        surv1 = [s1](double t) { return s1(t); };
        double b = cfit->beta[0];
        obs_hr = [b](double) { return std::exp(b); };
        double t_max = std::min(km0.max_followup, km1.max_followup);
        grid = tgrid_spec.empty() ? make_grid(0.0, t_max, t_max / 100.0)
                                  : detail::parse_grid_spec(tgrid_spec);
      } else {
        if (std::isnan(obs_hr_const) || (have_sr && std::isnan(pi_const)))
          throw input_error(
              "sensitivity: without --data, provide --obs-hr (and --pi for --sr)");
        if (tgrid_spec.empty())
          throw input_error("sensitivity: --tgrid required with synthetic inputs");
        grid = detail::parse_grid_spec(tgrid_spec);
        obs_hr = [obs_hr_const](double) { return obs_hr_const; };
        surv0 = [pi_const](double) { return pi_const; };
        surv1 = [](double) { return 1.0; };
      }

      ordered_json j;
      j["mode"] = have_tau ? "tau" : "sr";
      std::vector<SvgSeries> series;
      if (have_tau) {
        auto taus = detail::parse_double_list(tau_list);
        ordered_json files = ordered_json::array();
        for (double tau : taus) {
          double theta = theta_from_tau(tau);
          std::vector<std::vector<double>> rows;
          std::vector<double> vals;
          for (double t : grid) {
            double l0 = cfit ? cfit->baseline_cumhaz(t) : t;
            double b0 = cfit ? cfit->beta[0] : std::log(obs_hr_const);
            double v = causal_hr_closed(b0, theta, l0);
            rows.push_back({t, v});
            vals.push_back(v);
          }
          std::string fname = "hr_tau_" + detail::format_double(tau) + ".csv";
          write_table_csv(out_dir + "/" + fname, {"t", "value"}, rows);
          files.push_back(fname);
          series.push_back({"tau=" + detail::format_double(tau), grid, vals});
        }
        j["files"] = files;
      } else {
        SensitivityInput in{obs_hr, surv0, surv1, parse_sr_spec(sr_spec)};
        auto rows = sensitivity_sr(in, grid);
        std::vector<std::vector<double>> table;
        std::vector<double> vals;
        bool clipped = false;
        for (const auto& r : rows) {
          table.push_back({r.t, r.obs_hr, r.pi, r.sr, r.causal_hr});
          vals.push_back(r.causal_hr);
          clipped = clipped || r.pi_clipped;
        }
        write_table_csv(out_dir + "/sensitivity.csv",
                        {"t", "obs_hr", "pi", "sr", "causal_hr"}, table);
        j["files"] = {"sensitivity.csv"};
        j["pi_clipped"] = clipped;
        if (clipped)
          *io.err << "warning: pi(t) above 1 clipped (survival-curve noise)\n";
        series.push_back({"causal HR", grid, vals});
      }
      if (cfit) j["cox_beta"] = cfit->beta[0];
      detail::write_json(out_dir + "/sensitivity.json", j);
      if (svg)
        write_text_file(out_dir + "/sensitivity.svg",
                        svg_line_plot("sensitivity", series));
      *io.out << "wrote " << out_dir << "/sensitivity.json\n";
      return exit_code::ok;
    }

    if (*rm) {
      Dataset ds = read_dataset_csv(data_path);
      fs::create_directories(out_dir);
      ordered_json j;
      j["horizon"] = horizon;
      KmCurve km0 = kaplan_meier(ds.samples, 0);
      KmCurve km1 = kaplan_meier(ds.samples, 1);
      auto r0 = rmst(km0, horizon);
      auto r1 = rmst(km1, horizon);
      for (auto [name, r] : {std::pair<const char*, RmstResult*>{"arm0", &r0},
                             {"arm1", &r1}}) {
        j[name]["rmst"] = r->rmst;
        j[name]["rmtl"] = r->rmtl;
        j[name]["se"] = std::sqrt(r->variance);
      }
      auto ratio = rmtl_ratio(km1, km0, horizon, level);
      j["rmtl_ratio"]["estimate"] = ratio.ratio;
      j["rmtl_ratio"]["lo"] = ratio.lo;
      j["rmtl_ratio"]["hi"] = ratio.hi;
      j["rmtl_ratio"]["level"] = ratio.level;
      detail::write_json(out_dir + "/rmst.json", j);
      if (format == "json")
        *io.out << j.dump(2) << "\n";
      else
        *io.out << "rmtl ratio " << ratio.ratio << " (" << ratio.lo << ", "
                << ratio.hi << ")\n";
      return exit_code::ok;
    }

    if (*ver) {
      VerifyOptions vopt;
      vopt.tol_scale = tol_scale;
      vopt.only = only_filter;
      vopt.seed = seed;
      auto checks = run_verify(vopt);
      if (checks.empty()) throw input_error("verify: no checks match --only filter");
      bool all_pass = true;
      for (const auto& c : checks) {
        *io.out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
                << "\n";
        all_pass = all_pass && c.pass;
      }
      return all_pass ? exit_code::ok : exit_code::verify_failed;
    }
  } catch (const input_error& e) {
    *io.err << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception& e) {
    *io.err << "error: " << e.what() << "\n";
    return exit_code::runtime;
  }
  return exit_code::usage;
}

}  // namespace hazardlens
