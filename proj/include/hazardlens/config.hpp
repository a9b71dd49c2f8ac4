#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hazardlens/censoring.hpp"
#include "hazardlens/errors.hpp"
#include "hazardlens/frailty.hpp"
#include "hazardlens/stats_util.hpp"

namespace hazardlens {

/// A fully parsed experiment description. Dataset experiments generate
/// data, censor it and run the requested estimators per replicate; curve
/// experiments evaluate closed-form displays on a grid.
struct ExperimentConfig {
  std::string name = "experiment";
  enum class Mode { dataset, curves } mode = Mode::dataset;

  // data-generating process
  std::string dgp;  // changepoint-frailty | plain-cox | gamma-shared |
                    // two-level | shared-additive
  std::optional<FrailtySpec> frailty;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double beta1 = std::numeric_limits<double>::quiet_NaN();
  double beta2 = 0.0;
  double nu = std::numeric_limits<double>::infinity();
  double lambda0 = 1.0;  // constant baseline hazard rate
  double theta = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();

  std::size_t n = 0;
  int replicates = 1;
  std::uint64_t seed = 20240801;
  CensoringScheme censoring;
  std::vector<std::string> estimators;  // km cox coxcp aalen
  double fit_nu = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> tgrid;

  std::vector<std::string> curves;  // hrz selection hr-closed hrz-gamma
  std::vector<double> taus;
  double tau = std::numeric_limits<double>::quiet_NaN();

  bool emit_dataset = true;
  bool emit_pairs = false;
  int threads = 1;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

inline double to_double(const std::string& v, const std::string& src,
                        std::size_t line, const std::string& key) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw input_error(src + ":" + std::to_string(line) + ": key '" + key +
                      "': expected a number, got '" + v + "'");
  }
}

inline long long to_int(const std::string& v, const std::string& src,
                        std::size_t line, const std::string& key) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw input_error(src + ":" + std::to_string(line) + ": key '" + key +
                      "': expected an integer, got '" + v + "'");
  }
}

}  // namespace detail

/// Parses the flat `key = value` config format. `#` starts a comment;
/// unknown keys and malformed values are errors carrying source:line.
inline ExperimentConfig parse_config_text(const std::string& text,
                                          const std::string& src) {
  std::map<std::string, detail::ConfigEntry> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw input_error(src + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw input_error(src + ":" + std::to_string(line_no) +
                        ": empty key or value");
    if (kv.count(key))
      throw input_error(src + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    kv[key] = {value, line_no};
  }

  ExperimentConfig cfg;
  auto take = [&](const std::string& key) -> std::optional<detail::ConfigEntry> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto e = it->second;
    kv.erase(it);
    return e;
  };

  if (auto e = take("name")) cfg.name = e->value;
  if (auto e = take("experiment")) {
    if (e->value == "dataset")
      cfg.mode = ExperimentConfig::Mode::dataset;
    else if (e->value == "curves")
      cfg.mode = ExperimentConfig::Mode::curves;
    else
      throw input_error(src + ":" + std::to_string(e->line) +
                        ": experiment must be 'dataset' or 'curves'");
  }
  if (auto e = take("dgp")) cfg.dgp = e->value;
  if (auto e = take("frailty")) {
    auto toks = detail::split_ws(e->value);
    if (toks.size() >= 2 && toks[0] == "gamma") {
      cfg.frailty = FrailtySpec::gamma(
          detail::to_double(toks[1], src, e->line, "frailty"));
    } else if (toks.size() >= 2 && toks[0] == "discrete") {
      std::vector<std::pair<double, double>> atoms;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        auto colon = toks[i].find(':');
        if (colon == std::string::npos)
          throw input_error(src + ":" + std::to_string(e->line) +
                            ": discrete atoms must be z:p");
        atoms.emplace_back(
            detail::to_double(toks[i].substr(0, colon), src, e->line, "frailty"),
            detail::to_double(toks[i].substr(colon + 1), src, e->line, "frailty"));
      }
      try {
        cfg.frailty = FrailtySpec::discrete(atoms);
      } catch (const std::invalid_argument& ex) {
        throw input_error(src + ":" + std::to_string(e->line) + ": " + ex.what());
      }
    } else {
      throw input_error(src + ":" + std::to_string(e->line) +
                        ": frailty must be 'gamma <theta>' or 'discrete z:p ...'");
    }
  }

  for (auto [key, dst] :
       {std::pair<const char*, double*>{"beta", &cfg.beta},
        {"beta1", &cfg.beta1},
        {"beta2", &cfg.beta2},
        {"nu", &cfg.nu},
        {"lambda0", &cfg.lambda0},
        {"theta", &cfg.theta},
        {"alpha", &cfg.alpha},
        {"fit_nu", &cfg.fit_nu},
        {"tau", &cfg.tau}}) {
    if (auto e = take(key)) *dst = detail::to_double(e->value, src, e->line, key);
  }

  if (auto e = take("n")) {
    long long v = detail::to_int(e->value, src, e->line, "n");
    if (v < 1)
      throw input_error(src + ":" + std::to_string(e->line) + ": n must be >= 1");
    cfg.n = static_cast<std::size_t>(v);
  }
  if (auto e = take("replicates")) {
    long long v = detail::to_int(e->value, src, e->line, "replicates");
    if (v < 1)
      throw input_error(src + ":" + std::to_string(e->line) +
                        ": replicates must be >= 1");
    cfg.replicates = static_cast<int>(v);
  }
  if (auto e = take("seed"))
    cfg.seed = static_cast<std::uint64_t>(
        detail::to_int(e->value, src, e->line, "seed"));
  if (auto e = take("threads")) {
    long long v = detail::to_int(e->value, src, e->line, "threads");
    if (v < 1)
      throw input_error(src + ":" + std::to_string(e->line) +
                        ": threads must be >= 1");
    cfg.threads = static_cast<int>(v);
  }

  if (auto e = take("censoring")) {
    auto toks = detail::split_ws(e->value);
    try {
      if (toks[0] == "none") {
        cfg.censoring = CensoringScheme::none();
      } else if (toks[0] == "reference") {
        double um = toks.size() > 1 ? detail::to_double(toks[1], src, e->line, "censoring") : 10.0;
        double ad = toks.size() > 2 ? detail::to_double(toks[2], src, e->line, "censoring") : 8.0;
        double fr = toks.size() > 3 ? detail::to_double(toks[3], src, e->line, "censoring") : 0.5;
        cfg.censoring = CensoringScheme::reference(um, ad, fr);
      } else if (toks[0] == "uniform" && toks.size() > 1) {
        cfg.censoring = CensoringScheme::uniform(
            detail::to_double(toks[1], src, e->line, "censoring"));
      } else if (toks[0] == "admin" && toks.size() > 1) {
        cfg.censoring = CensoringScheme::admin(
            detail::to_double(toks[1], src, e->line, "censoring"));
      } else {
        throw input_error("bad scheme");
      }
    } catch (const input_error&) {
      throw input_error(src + ":" + std::to_string(e->line) +
                        ": censoring must be none | reference [u_max admin frac] "
                        "| uniform <u_max> | admin <t>");
    }
  }

  if (auto e = take("estimators")) cfg.estimators = detail::split_ws(e->value);
  if (auto e = take("curves")) cfg.curves = detail::split_ws(e->value);
  if (auto e = take("taus")) {
    for (auto& tok : detail::split_ws(e->value))
      cfg.taus.push_back(detail::to_double(tok, src, e->line, "taus"));
  }
  if (auto e = take("tgrid")) {
    auto& v = e->value;
    auto c1 = v.find(':');
    auto c2 = v.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw input_error(src + ":" + std::to_string(e->line) +
                        ": tgrid must be start:stop:step");
    double a = detail::to_double(v.substr(0, c1), src, e->line, "tgrid");
    double b = detail::to_double(v.substr(c1 + 1, c2 - c1 - 1), src, e->line, "tgrid");
    double s = detail::to_double(v.substr(c2 + 1), src, e->line, "tgrid");
    if (!(s > 0.0) || b < a)
      throw input_error(src + ":" + std::to_string(e->line) + ": bad tgrid range");
    cfg.tgrid = make_grid(a, b, s);
  }
  if (auto e = take("emit_dataset")) cfg.emit_dataset = e->value == "true";
  if (auto e = take("emit_pairs")) cfg.emit_pairs = e->value == "true";

  if (!kv.empty()) {
    const auto& [key, entry] = *kv.begin();
    throw input_error(src + ":" + std::to_string(entry.line) +
                      ": unknown key '" + key + "'");
  }
  return cfg;
}

/// The named configurations that ship with the toolkit. Each one is a
/// one-command reproduction path for a study display; `hazardlens simulate
/// --config <name>` accepts these names as well as file paths.
inline const std::map<std::string, std::string>& bundled_configs() {
  static const std::map<std::string, std::string> configs = {
      {"sim31", R"(# change-point fit on binary-frailty data
name = sim31
experiment = dataset
dgp = changepoint-frailty
frailty = discrete 0.2:0.2 1.2:0.8
beta1 = -0.6931471805599453
beta2 = 0
nu = 4
lambda0 = 0.4
n = 20000
censoring = reference 10 8 0.5
estimators = coxcp
fit_nu = 4
seed = 31415926
replicates = 1
emit_dataset = true
)"},
      {"fig1", R"(# conditional hazard-ratio curve for the binary-frailty study
name = fig1
experiment = curves
curves = hrz
frailty = discrete 0.2:0.2 1.2:0.8
beta1 = -0.6931471805599453
beta2 = 0
nu = 4
lambda0 = 0.4
tgrid = 0:8:0.02
)"},
      {"fig2", R"(# frailty means among survivors, by arm
name = fig2
experiment = curves
curves = selection
frailty = discrete 0.2:0.2 1.2:0.8
beta1 = -0.6931471805599453
beta2 = 0
nu = 4
lambda0 = 0.4
tgrid = 0:8:0.02
)"},
      {"fig3", R"(# principal-stratum hazard-ratio curves across coupling strengths
name = fig3
experiment = curves
curves = hr-closed
beta = -0.6931471805599453
taus = 0 0.04 0.2 0.49 0.83 0.98
lambda0 = 1
tgrid = 0:3:0.02
)"},
      {"fig4", R"(# unadjusted additive-hazards fit on binary-frailty data
name = fig4
experiment = dataset
dgp = changepoint-frailty
frailty = discrete 0.2:0.2 1.2:0.8
beta1 = -0.6931471805599453
beta2 = 0
nu = 4
lambda0 = 0.4
n = 20000
censoring = reference 10 8 0.5
estimators = aalen
seed = 31415926
replicates = 1
emit_dataset = false
)"},
      {"fig6-shape", R"(# sensitivity curves for a proportional-hazards fit, synthetic baseline
name = fig6-shape
experiment = curves
curves = hr-closed
beta = -0.2876820724517809
taus = 0.1 0.2 0.3
lambda0 = 0.06323733282952938
tgrid = 0:30:0.25
)"},
      {"fig9-shape", R"(# conditional hazard-ratio curve for a fitted change-point model
name = fig9-shape
experiment = curves
curves = hrz-gamma
beta1 = 0.8754687373538999
beta2 = -0.2484613592984996
nu = 1
tau = 0.3
lambda0 = 0.3607200685802324
tgrid = 0:2:0.01
)"},
  };
  return configs;
}

/// Loads a config by bundled name or from a file path (file wins when both
/// exist).
inline ExperimentConfig load_config(const std::string& name_or_path) {
  std::ifstream in(name_or_path);
  if (in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), name_or_path);
  }
  auto it = bundled_configs().find(name_or_path);
  if (it == bundled_configs().end())
    throw input_error("config '" + name_or_path +
                      "' is neither a file nor a bundled name");
  return parse_config_text(it->second, name_or_path);
}

}  // namespace hazardlens
