#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "lsl/grid.hpp"

namespace lsl {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;  // of log(value) at log(eps) = 0
  double r2 = 1.0;
  std::vector<double> residuals;  // log(value) - fit, per point
};

// least squares of log(value) against log(eps)
inline FitResult fit_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw UsageError("exponent fit needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [e, v] : points) {
    if (!(e > 0.0) || !(v > 0.0) || !std::isfinite(v)) throw UsageError("exponent fit needs positive finite values");
    sx += std::log(e);
    sy += std::log(v);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [e, v] : points) {
    const double dx = std::log(e) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw UsageError("exponent fit needs distinct eps values");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (const auto& [e, v] : points) {
    const double r = std::log(v) - (f.intercept + f.slope * std::log(e));
    f.residuals.push_back(r);
    sse += r * r;
  }
  // a constant series is fitted exactly
  f.r2 = syy > 0.0 ? std::max(0.0, std::min(1.0, 1.0 - sse / syy)) : 1.0;
  return f;
}

}  // namespace lsl
