#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hazardlens/errors.hpp"

namespace hazardlens {

/// Right-continuous piecewise-constant function on [0, inf).
///
/// `values` holds one entry per interval, including the value on
/// [0, jump_times[0]); so values.size() == jump_times.size() + 1.
/// The shared representation for hazards, cumulative hazards, survival
/// curves and cumulative regression coefficients.
class StepFunction {
 public:
  StepFunction() : values_{0.0} {}

  StepFunction(std::vector<double> jump_times, std::vector<double> values,
               std::optional<double> domain_end = std::nullopt)
      : jump_times_(std::move(jump_times)),
        values_(std::move(values)),
        domain_end_(domain_end) {
    if (values_.size() != jump_times_.size() + 1)
      throw std::invalid_argument("StepFunction: need one value per interval");
    double prev = 0.0;
    bool first = true;
    for (double t : jump_times_) {
      if (!(t > 0.0) || (!first && !(t > prev)))
        throw std::invalid_argument(
            "StepFunction: jump times must be strictly increasing and positive");
      prev = t;
      first = false;
    }
  }

  static StepFunction constant(double v) { return StepFunction({}, {v}); }

  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<double>& values() const { return values_; }
  std::optional<double> domain_end() const { return domain_end_; }

  /// Right-continuous evaluation at t >= 0.
  double operator()(double t) const {
    check_domain(t);
    auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
    return values_[static_cast<std::size_t>(it - jump_times_.begin())];
  }

  /// Exact integral over [0, t] (sum of rectangle areas).
  double integral(double t) const {
    check_domain(t);
    double area = 0.0, left = 0.0;
    for (std::size_t k = 0; k < jump_times_.size(); ++k) {
      double right = jump_times_[k];
      if (t <= right) return area + (t - left) * values_[k];
      area += (right - left) * values_[k];
      left = right;
    }
    return area + (t - left) * values_.back();
  }

  /// For a nonnegative hazard h, solves inf{t : integral(t) >= u} exactly
  /// (linear interpolation within segments). Returns +inf when the total
  /// hazard is exhausted before reaching u.
  double invert_integral(double u) const {
    if (!(u > 0.0)) throw std::domain_error("invert_integral: u must be > 0");
    double cum = 0.0, left = 0.0;
    for (std::size_t k = 0; k < jump_times_.size(); ++k) {
      double right = jump_times_[k];
      double v = values_[k];
      double next = cum + v * (right - left);
      if (u <= next && v > 0.0) return left + (u - cum) / v;
      cum = next;
      left = right;
    }
    if (values_.back() > 0.0) return left + (u - cum) / values_.back();
    return std::numeric_limits<double>::infinity();
  }

  /// Pointwise sum; jump set is the merged jump set.
  friend StepFunction operator+(const StepFunction& a, const StepFunction& b) {
    std::vector<double> jumps;
    jumps.reserve(a.jump_times_.size() + b.jump_times_.size());
    std::merge(a.jump_times_.begin(), a.jump_times_.end(), b.jump_times_.begin(),
               b.jump_times_.end(), std::back_inserter(jumps));
    jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
    std::vector<double> vals;
    vals.reserve(jumps.size() + 1);
    vals.push_back(a.values_.front() + b.values_.front());
    for (double t : jumps) vals.push_back(a(t) + b(t));
    return StepFunction(std::move(jumps), std::move(vals));
  }

  double min_value() const {
    return *std::min_element(values_.begin(), values_.end());
  }

 private:
  void check_domain(double t) const {
    if (t < 0.0) throw std::domain_error("StepFunction: t must be >= 0");
    if (domain_end_ && t > *domain_end_)
      throw std::domain_error("StepFunction: t beyond domain end");
  }

  std::vector<double> jump_times_;
  std::vector<double> values_;
  std::optional<double> domain_end_;
};

/// A cumulative hazard usable for event-time sampling and curve displays.
/// Wraps a StepFunction either as a piecewise-constant *rate* (the cumulative
/// is its exact integral, piecewise linear) or as an already-cumulative step
/// (Nelson-Aalen / Breslow style).
class CumulativeHazard {
 public:
  static CumulativeHazard from_rate(StepFunction rate) {
    return CumulativeHazard(Kind::rate, std::move(rate));
  }
  static CumulativeHazard constant_rate(double rate) {
    return from_rate(StepFunction::constant(rate));
  }
  static CumulativeHazard from_cumulative(StepFunction cum) {
    return CumulativeHazard(Kind::cumulative, std::move(cum));
  }

  /// Lambda(t).
  double operator()(double t) const {
    return kind_ == Kind::rate ? f_.integral(t) : f_(t);
  }

  /// inf{t : Lambda(t) >= u}; +inf when u exceeds sup Lambda.
  double invert(double u) const {
    if (!(u > 0.0)) throw std::domain_error("CumulativeHazard: u must be > 0");
    if (kind_ == Kind::rate) return f_.invert_integral(u);
    const auto& jumps = f_.jump_times();
    const auto& vals = f_.values();
    for (std::size_t k = 0; k < jumps.size(); ++k)
      if (vals[k + 1] >= u) return jumps[k];
    return std::numeric_limits<double>::infinity();
  }

  bool is_rate() const { return kind_ == Kind::rate; }
  const StepFunction& step() const { return f_; }

 private:
  enum class Kind { rate, cumulative };
  CumulativeHazard(Kind kind, StepFunction f) : kind_(kind), f_(std::move(f)) {}

  Kind kind_;
  StepFunction f_;
};

}  // namespace hazardlens
