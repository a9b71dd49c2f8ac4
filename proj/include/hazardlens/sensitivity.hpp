#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hazardlens/csv.hpp"
#include "hazardlens/errors.hpp"
#include "hazardlens/step_function.hpp"

namespace hazardlens {

/// Inputs to the selection-effect sensitivity analysis: the observed hazard
/// ratio curve, the two arm survival curves (for pi(t) = S0/S1) and the
/// analyst-chosen sensitivity ratio SR(t).
struct SensitivityInput {
  std::function<double(double)> obs_hr;
  std::function<double(double)> surv0;
  std::function<double(double)> surv1;
  std::function<double(double)> sr;
};

struct SensitivityRow {
  double t = 0.0;
  double obs_hr = 0.0;
  double pi = 0.0;
  double sr = 0.0;
  double causal_hr = 0.0;
  bool pi_clipped = false;  // survival-curve noise pushed S0/S1 above 1
};

/// HR(t) = obs_hr(t) / [pi(t) + SR(t) (1 - pi(t))], pi(t) = S0(t)/S1(t).
/// pi above 1 (possible with noisy survival estimates) is clipped to 1 and
/// flagged; a zero denominator is an error at that grid point.
inline std::vector<SensitivityRow> sensitivity_sr(
    const SensitivityInput& input, const std::vector<double>& tgrid) {
  std::vector<SensitivityRow> rows;
  rows.reserve(tgrid.size());
  for (double t : tgrid) {
    SensitivityRow r;
    r.t = t;
    r.obs_hr = input.obs_hr(t);
    r.sr = input.sr(t);
    if (r.sr < 0.0)
      throw input_error("sensitivity_sr: SR(t) must be >= 0 (t = " +
                        std::to_string(t) + ")");
    double s0 = input.surv0(t), s1 = input.surv1(t);
    if (!(s0 > 0.0) || !(s1 > 0.0))
      throw estimation_error("sensitivity_sr: survival must stay positive (t = " +
                             std::to_string(t) + ")");
    r.pi = s0 / s1;
    if (r.pi > 1.0) {
      r.pi = 1.0;
      r.pi_clipped = true;
    }
    double denom = r.pi + r.sr * (1.0 - r.pi);
    if (denom == 0.0)
      throw estimation_error("sensitivity_sr: zero denominator at t = " +
                             std::to_string(t));
    r.causal_hr = r.obs_hr / denom;
    rows.push_back(r);
  }
  return rows;
}

/// Parses an SR(t) specification: "const:<v>", "piecewise:t1=v1,t2=v2,..."
/// (right-continuous steps; first knot must be 0), or "table:<csv>" with
/// columns t,value.
inline std::function<double(double)> parse_sr_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw input_error("bad SR spec '" + spec + "' (want const:, piecewise: or table:)");
  std::string kind = spec.substr(0, colon);
  std::string body = spec.substr(colon + 1);

  if (kind == "const") {
    double v = 0.0;
    try {
      v = std::stod(body);
    } catch (...) {
      throw input_error("bad SR spec '" + spec + "': not a number");
    }
    if (v < 0.0) throw input_error("SR must be >= 0");
    return [v](double) { return v; };
  }

  if (kind == "piecewise") {
    std::vector<double> knots, vals;
    std::size_t start = 0;
    while (start <= body.size()) {
      auto comma = body.find(',', start);
      std::string tok = body.substr(start, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - start);
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw input_error("bad SR piecewise token '" + tok + "' (want t=v)");
      try {
        knots.push_back(std::stod(tok.substr(0, eq)));
        vals.push_back(std::stod(tok.substr(eq + 1)));
      } catch (...) {
        throw input_error("bad SR piecewise token '" + tok + "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (knots.empty() || knots.front() != 0.0)
      throw input_error("SR piecewise spec must start at t=0");
    std::vector<double> jumps(knots.begin() + 1, knots.end());
    StepFunction f(jumps, vals);
    return [f](double t) { return f(t); };
  }

  if (kind == "table") {
    std::ifstream in(body);
    if (!in) throw input_error("cannot open SR table: " + body);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> knots, vals;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto fields = detail::split_csv_line(line);
      if (fields.size() != 2)
        throw input_error(body + ":" + std::to_string(line_no) +
                          ": want two columns t,value");
      knots.push_back(detail::parse_double_field(fields[0], body, line_no, "t"));
      vals.push_back(detail::parse_double_field(fields[1], body, line_no, "value"));
    }
    if (knots.empty() || knots.front() != 0.0)
      throw input_error("SR table must start at t=0");
    std::vector<double> jumps(knots.begin() + 1, knots.end());
    StepFunction f(jumps, vals);
    return [f](double t) { return f(t); };
  }

  throw input_error("bad SR spec kind '" + kind + "'");
}

}  // namespace hazardlens
