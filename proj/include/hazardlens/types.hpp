#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace hazardlens {

/// One subject's follow-up record.
struct SurvivalSample {
  std::string id;
  double time = 0.0;               // study time, >= 0
  int status = 1;                  // 1 = event, 0 = censored
  int arm = 0;                     // treatment indicator
  std::vector<double> covariates;  // same length across a dataset
};

/// One simulated unit's coupled potential outcomes. `z2` is NaN except for
/// two-level frailty generators. t_obs always satisfies consistency:
/// t_obs = t0 when a = 0 and t1 when a = 1.
struct PotentialOutcomePair {
  double t0 = 0.0;
  double t1 = 0.0;
  double z = 1.0;
  double z2 = std::numeric_limits<double>::quiet_NaN();
  int a = 0;
  double t_obs = 0.0;
};

inline PotentialOutcomePair make_pair_obs(double t0, double t1, double z,
                                          int a) {
  PotentialOutcomePair p;
  p.t0 = t0;
  p.t1 = t1;
  p.z = z;
  p.a = a;
  p.t_obs = a == 0 ? t0 : t1;
  return p;
}

/// A dataset read from or written to the CSV schema
/// `id,time,status,arm[,cov_1..cov_k]`, with optional generator extension
/// columns z, t0, t1 (empty vectors when absent).
struct Dataset {
  std::vector<SurvivalSample> samples;
  std::size_t n_covariates = 0;
  std::vector<double> z;
  std::vector<double> t0;
  std::vector<double> t1;
};

}  // namespace hazardlens
