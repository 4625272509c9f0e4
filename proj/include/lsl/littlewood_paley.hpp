#pragma once

#include <cmath>
#include <string>

#include "lsl/operators.hpp"

namespace lsl {

// radial low-pass: 1 on [0,1], 0 on [2,inf), quintic smoothstep of log2 r between
inline double phi_hat(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double x = std::log2(r);
  return 1.0 - x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

// S_j a has symbol phi_hat(2^-j |k|), Delta_j = S_{j+1} - S_j. The block
// range is chosen so that S_{j_min} kills every nonzero lattice mode and
// S_{j_max+1} passes the corner of the cube, hence sum_j Delta_j = Id on
// mean-zero fields.
class LPFilterBank {
 public:
  explicit LPFilterBank(const Grid& g)
      : grid_(g),
        j_min_(static_cast<int>(std::floor(std::log2(g.k_unit()))) - 1),
        j_max_(static_cast<int>(std::ceil(std::log2(std::sqrt(3.0) * g.nyquist()))) - 1) {}

  const Grid& grid() const { return grid_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }

  double low_symbol(int j, double kmag) const { return phi_hat(std::ldexp(kmag, -j)); }
  double block_symbol(int j, double kmag) const { return low_symbol(j + 1, kmag) - low_symbol(j, kmag); }

  SpectralField low_pass(const SpectralField& a, int j) const {
    check(a);
    SpectralField out(grid_);
    for_each_mode(grid_, [&](const Mode& m) { out[m.index] = low_symbol(j, std::sqrt(m.k2())) * a[m.index]; });
    return out;
  }

  SpectralField block(const SpectralField& a, int j) const {
    check(a);
    if (j < j_min_ || j > j_max_)
      throw UsageError("dyadic block " + std::to_string(j) + " outside [" + std::to_string(j_min_) + ", " +
                       std::to_string(j_max_) + "]");
    SpectralField out(grid_);
    for_each_mode(grid_, [&](const Mode& m) { out[m.index] = block_symbol(j, std::sqrt(m.k2())) * a[m.index]; });
    return out;
  }

  // L^2 size of what the resolved blocks miss (the mean, for in-range grids)
  double residual(const SpectralField& a) const {
    check(a);
    SpectralField rest(grid_);
    for_each_mode(grid_, [&](const Mode& m) {
      const double k = std::sqrt(m.k2());
      rest[m.index] = (1.0 - low_symbol(j_max_ + 1, k) + low_symbol(j_min_, k)) * a[m.index];
    });
    return std::sqrt(l2_norm_sq(rest));
  }

 private:
  void check(const SpectralField& a) const {
    if (!(a.grid() == grid_)) throw UsageError("filter bank built for a different grid");
  }
  Grid grid_;
  int j_min_, j_max_;
};

}  // namespace lsl
