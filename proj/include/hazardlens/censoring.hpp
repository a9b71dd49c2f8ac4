#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hazardlens/errors.hpp"
#include "hazardlens/rng.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

/// Censoring mechanisms for simulated datasets. The reference scheme
/// assigns Uniform(0, u_max) censoring to a random fraction of subjects and
/// administrative censoring at admin_time to the rest.
struct CensoringScheme {
  enum class Kind { none, reference, uniform, admin };
  Kind kind = Kind::none;
  double u_max = 10.0;
  double admin_time = 8.0;
  double random_fraction = 0.5;

  static CensoringScheme none() { return {}; }

  static CensoringScheme reference(double u_max = 10.0, double admin_time = 8.0,
                                   double random_fraction = 0.5) {
    if (!(u_max > 0.0) || !(admin_time > 0.0) || !(random_fraction >= 0.0) ||
        !(random_fraction <= 1.0))
      throw input_error("censoring: bad reference-scheme parameters");
    CensoringScheme s;
    s.kind = Kind::reference;
    s.u_max = u_max;
    s.admin_time = admin_time;
    s.random_fraction = random_fraction;
    return s;
  }

  static CensoringScheme uniform(double u_max) {
    if (!(u_max > 0.0)) throw input_error("censoring: u_max must be > 0");
    CensoringScheme s;
    s.kind = Kind::uniform;
    s.u_max = u_max;
    return s;
  }

  static CensoringScheme admin(double t) {
    if (t < 0.0) throw input_error("censoring: admin time must be >= 0");
    CensoringScheme s;
    s.kind = Kind::admin;
    s.admin_time = t;
    return s;
  }
};

/// Applies censoring to samples carrying true event times (status 1).
/// Censoring assignment draws from its own stream, so the event-time stream
/// is unaffected by the scheme choice.
inline std::vector<SurvivalSample> apply_censoring(
    std::vector<SurvivalSample> samples, const CensoringScheme& scheme,
    RngStream& rng) {
  for (auto& s : samples) {
    double c = 0.0;
    switch (scheme.kind) {
      case CensoringScheme::Kind::none:
        if (!std::isfinite(s.time))
          throw estimation_error(
              "apply_censoring: infinite event time needs a censoring scheme");
        continue;
      case CensoringScheme::Kind::reference:
        c = rng.bernoulli(scheme.random_fraction) ? rng.uniform(0.0, scheme.u_max)
                                                  : scheme.admin_time;
        break;
      case CensoringScheme::Kind::uniform:
        c = rng.uniform(0.0, scheme.u_max);
        break;
      case CensoringScheme::Kind::admin:
        c = scheme.admin_time;
        break;
    }
    if (c < s.time) {
      s.time = c;
      s.status = 0;
    }
  }
  return samples;
}

inline double censored_fraction(const std::vector<SurvivalSample>& samples) {
  if (samples.empty()) return 0.0;
  std::size_t c = 0;
  for (const auto& s : samples) c += s.status == 0;
  return static_cast<double>(c) / static_cast<double>(samples.size());
}

}  // namespace hazardlens
