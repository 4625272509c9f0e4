#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lsl/besov.hpp"

namespace lsl {

struct BmoValue {
  double heat_term = 0.0;      // sup_t t^{1/2} ||e^{t Lap} u0||_inf
  double carleson_term = 0.0;  // (sup_{x,R} R^-3 int_0^{R^2} int_B |e^{t Lap} u0|^2)^{1/2}
  double total = 0.0;
  std::size_t centers = 0, radii = 0, times = 0;  // the finite (x,R,t) set behind the sup
};

struct BmoOptions {
  std::size_t padding = 2;
  std::size_t center_stride = 0;  // 0: n/8
};

// integral of e^{-ik.y} over the ball |y| < R
inline double ball_transform(double k, double R) {
  const double kr = k * R;
  if (kr < 1e-2) {
    const double k2 = kr * kr;
    return 4.0 * pi / 3.0 * R * R * R * (1.0 - k2 / 10.0 + k2 * k2 / 280.0);
  }
  return 4.0 * pi * (std::sin(kr) - kr * std::cos(kr)) / (k * k * k);
}

// Ball averages come from multiplying the spectrum of |e^{t Lap}u0|^2 (exact
// on the padded grid) by the ball transform; the time integral is a
// trapezoid over {0} + TimeGrid samples + {R^2}. Sup over x and R is taken on
// a finite set, so the Carleson term is a lower bound of the continuum one.
inline BmoValue bmo_inv_norm(const SpectralVectorField& u0, const TimeGrid& tg, const BmoOptions& opt = {}) {
  BmoValue out;
  for (int i = 0; i < 3; ++i)
    if (detail::has_mean(u0[i])) throw UsageError("BMO^-1 norm needs mean-zero data");
  if (u0.is_zero()) return out;

  out.heat_term = besov_norm_heat(u0, 1.0, Lp::inf, Lp::inf, tg, opt.padding).value;

  const Grid& g = u0.grid();
  const Grid fine = g.padded(opt.padding);
  const std::size_t n = g.n();
  const std::size_t stride = opt.center_stride ? opt.center_stride : std::max<std::size_t>(1, n / 8);
  std::vector<std::size_t> centers;
  for (std::size_t j0 = 0; j0 < n; j0 += stride)
    for (std::size_t j1 = 0; j1 < n; j1 += stride)
      for (std::size_t j2 = 0; j2 < n; j2 += stride)
        centers.push_back(fine.point(j0 * opt.padding, j1 * opt.padding, j2 * opt.padding));

  std::vector<double> radii;
  for (double R = g.spacing(); R <= 0.5 * g.box_len() * (1.0 + 1e-12); R *= 2.0) radii.push_back(R);

  const double t_end = radii.back() * radii.back();
  std::vector<double> times{0.0};
  for (double t : tg.samples())
    if (t < t_end) times.push_back(t);
  for (double R : radii) times.push_back(R * R);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  out.centers = centers.size();
  out.radii = radii.size();
  out.times = times.size();

  // ball symbols do not depend on t
  std::vector<std::vector<double>> symbol(radii.size(), std::vector<double>(fine.spectral_size()));
  for (std::size_t r = 0; r < radii.size(); ++r)
    for_each_mode(fine, [&](const Mode& m) { symbol[r][m.index] = ball_transform(std::sqrt(m.k2()), radii[r]); });

  std::vector<std::vector<double>> acc(radii.size(), std::vector<double>(centers.size(), 0.0));
  std::vector<std::vector<double>> prev = acc;

  for (std::size_t it = 0; it < times.size(); ++it) {
    const double t = times[it];
    RealField e2(fine);
    for (int c = 0; c < 3; ++c) {
      if (u0[c].is_zero()) continue;
      const RealField v = inverse_padded(heat_flow(u0[c], t), opt.padding);
      for (std::size_t p = 0; p < fine.physical_size(); ++p) e2[p] += v[p] * v[p];
    }
    const SpectralField spec = forward(e2);
    for (std::size_t r = 0; r < radii.size(); ++r) {
      const double R = radii[r];
      if (R * R < t) continue;
      SpectralField ball(fine);
      for (std::size_t i = 0; i < fine.spectral_size(); ++i) ball[i] = symbol[r][i] * spec[i];
      const RealField b = inverse(ball);
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double cur = b[centers[c]];
        if (it > 0) acc[r][c] += 0.5 * (t - times[it - 1]) * (prev[r][c] + cur);
        prev[r][c] = cur;
      }
    }
  }

  double sup = 0.0;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double inv = 1.0 / (radii[r] * radii[r] * radii[r]);
    for (double v : acc[r]) sup = std::max(sup, v * inv);
  }
  out.carleson_term = std::sqrt(sup);
  out.total = out.heat_term + out.carleson_term;
  return out;
}

}  // namespace lsl
