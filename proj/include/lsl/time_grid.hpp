#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lsl/grid.hpp"

namespace lsl {

// Log-spaced samples t_i = t_min (t_max/t_min)^{i/(count-1)}. Integrals in
// dt/t become trapezoid sums in s = log t.
struct TimeGrid {
  double t_min;
  double t_max;
  std::size_t count;

  // t_min resolves the Nyquist shell (t_min * Nyquist^2 = 1/4), t_max = 4 L^2
  static TimeGrid for_grid(const Grid& g, std::size_t count = 96) {
    const double tm = 1.0 / (static_cast<double>(g.n()) * g.k_unit());
    TimeGrid tg{tm * tm, 4.0 * g.box_len() * g.box_len(), count};
    tg.validate();
    return tg;
  }

  void validate() const {
    if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max))
      throw UsageError("time grid needs 0 < t_min < t_max");
    if (count < 64) throw UsageError("time grid needs at least 64 samples");
  }

  double log_step() const { return std::log(t_max / t_min) / static_cast<double>(count - 1); }

  std::vector<double> samples() const {
    validate();
    std::vector<double> t(count);
    const double ds = log_step();
    for (std::size_t i = 0; i < count; ++i) t[i] = t_min * std::exp(ds * static_cast<double>(i));
    t.back() = t_max;
    return t;
  }

  TimeGrid refined(std::size_t factor = 2) const {
    return TimeGrid{t_min, t_max, (count - 1) * factor + 1};
  }
};

}  // namespace lsl
