#pragma once

#include <stdexcept>
#include <string>

namespace hazardlens {

/// Malformed user input: CSV schema violations, bad config files, bad flag
/// combinations. The CLI maps this to exit code 2.
struct input_error : std::runtime_error {
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An estimator failed on statistically degenerate data (separation,
/// rank deficiency, empty selections). The CLI maps this to exit code 3.
struct estimation_error : std::runtime_error {
  explicit estimation_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hazardlens
