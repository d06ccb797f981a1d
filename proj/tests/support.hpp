#pragma once

#include <doctest.h>

#include <cmath>
#include <random>

#include "magsense/model.hpp"
#include "magsense/param_file.hpp"

namespace testing {

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

inline magsense::DerivedParameters baseline_dp(double r_m = 0.0, double temperature = 0.05) {
  auto p = magsense::with_squeeze(magsense::baseline_parameters(), r_m);
  p.temperature = temperature;
  return magsense::derived_parameters(p);
}

}  // namespace testing
