#pragma once

#include <cstddef>
#include <span>

namespace rsi {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

/// Simple least-squares line y = intercept + slope * x.
///
/// r_squared = 1 - SS_res / SS_tot; with SS_tot == 0 it is 1 when the fit is
/// exact and 0 otherwise. Throws std::invalid_argument on a length mismatch,
/// fewer than two points, or constant xs.
FitResult ols_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace rsi
