#include "rsi/regression.hpp"

#include <stdexcept>

namespace rsi {

FitResult ols_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("ols_fit: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("ols_fit: need at least 2 points");

  const auto count = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= count;
  mean_y /= count;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("ols_fit: xs have no variance");

  FitResult fit;
  fit.n_points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  if (syy == 0.0) {
    fit.r_squared = ss_res == 0.0 ? 1.0 : 0.0;
  } else {
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

}  // namespace rsi
