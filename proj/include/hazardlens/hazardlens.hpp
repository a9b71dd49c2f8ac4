#pragma once

// Umbrella header: the full toolkit.

#include "hazardlens/aalen.hpp"
#include "hazardlens/causal_hr.hpp"
#include "hazardlens/censoring.hpp"
#include "hazardlens/config.hpp"
#include "hazardlens/coupling.hpp"
#include "hazardlens/cox.hpp"
#include "hazardlens/csv.hpp"
#include "hazardlens/errors.hpp"
#include "hazardlens/experiment.hpp"
#include "hazardlens/frailty.hpp"
#include "hazardlens/hazard_difference.hpp"
#include "hazardlens/kaplan_meier.hpp"
#include "hazardlens/kendall.hpp"
#include "hazardlens/linalg.hpp"
#include "hazardlens/rmst.hpp"
#include "hazardlens/rng.hpp"
#include "hazardlens/rr_curve.hpp"
#include "hazardlens/sensitivity.hpp"
#include "hazardlens/stats_util.hpp"
#include "hazardlens/step_function.hpp"
#include "hazardlens/svg.hpp"
#include "hazardlens/types.hpp"
#include "hazardlens/verify.hpp"
