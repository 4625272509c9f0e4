#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lsl/lebesgue.hpp"
#include "lsl/littlewood_paley.hpp"
#include "lsl/time_grid.hpp"

namespace lsl {

struct NormValue {
  double value = 0.0;
  double residual = 0.0;  // estimated discretization / truncation error, same units
};

// ||e^{t Lap} a||_{L^p} on a TimeGrid. Samples whose cheap spectral bound is
// negligible next to what has been seen are not transformed; the bound is
// stored instead and counted in `skipped`.
struct HeatProfile {
  std::vector<double> t;
  std::vector<double> value;
  std::size_t skipped = 0;
  double k_min_sq = 0.0;  // smallest |k|^2 carrying content
};

namespace detail {

struct ModeWeights {
  std::vector<double> k2;
  std::vector<double> abs_c;  // weight * |c|
  std::vector<double> norm_c;  // weight * |c|^2
  double k_min_sq = 0.0;
};

inline ModeWeights mode_weights(const SpectralField& a) {
  ModeWeights w;
  double kmin = std::numeric_limits<double>::infinity();
  for_each_mode(a.grid(), [&](const Mode& m) {
    const cplx c = a[m.index];
    if (c == cplx{}) return;
    w.k2.push_back(m.k2());
    w.abs_c.push_back(m.weight * std::abs(c));
    w.norm_c.push_back(m.weight * std::norm(c));
    if (m.k2() > 0.0) kmin = std::min(kmin, m.k2());
  });
  w.k_min_sq = std::isfinite(kmin) ? kmin : 0.0;
  return w;
}

inline bool has_mean(const SpectralField& a) {
  const double scale = a.max_abs();
  return scale > 0.0 && std::abs(a[0]) > 1e-10 * scale;
}

}  // namespace detail

inline HeatProfile heat_profile(const SpectralField& a, Lp p, const TimeGrid& tg, std::size_t padding = 2) {
  HeatProfile prof;
  prof.t = tg.samples();
  prof.value.assign(prof.t.size(), 0.0);
  if (a.is_zero()) return prof;
  const auto w = detail::mode_weights(a);
  prof.k_min_sq = w.k_min_sq;
  const double vol = a.grid().volume();
  double best = 0.0, best_t = 0.0;  // max h_i and max t_i h_i so far
  for (std::size_t i = 0; i < prof.t.size(); ++i) {
    const double t = prof.t[i];
    double sup_bound = 0.0, l2sq = 0.0;
    for (std::size_t m = 0; m < w.k2.size(); ++m) {
      const double e = std::exp(-t * w.k2[m]);
      sup_bound += e * w.abs_c[m];
      l2sq += e * e * w.norm_c[m];
    }
    const double l2 = std::sqrt(vol * l2sq);
    if (p == Lp::two) {
      prof.value[i] = l2;
      continue;
    }
    const double bound = p == Lp::inf ? sup_bound : std::sqrt(sup_bound * l2);
    if (best > 0.0 && bound <= 1e-14 * best && t * bound <= 1e-14 * best_t) {
      prof.value[i] = bound;
      ++prof.skipped;
      continue;
    }
    prof.value[i] = lebesgue_norm(heat_flow(a, t), p, padding);
    best = std::max(best, prof.value[i]);
    best_t = std::max(best_t, t * prof.value[i]);
  }
  return prof;
}

// sup_t t^{s/2} h(t) (q = inf) or (int (t^{s/2} h)^q dt/t)^{1/q} from samples
inline NormValue besov_from_profile(const HeatProfile& prof, double sigma, Lp q) {
  const std::size_t n = prof.t.size();
  if (n < 3) throw UsageError("profile too short");
  const double ds = std::log(prof.t[1] / prof.t[0]);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::pow(prof.t[i], 0.5 * sigma) * prof.value[i];
  NormValue out;
  if (q == Lp::inf) {
    const std::size_t k = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
    out.value = g[k];
    if (g[k] == 0.0) return out;
    if (k == 0 || k == n - 1) {
      out.residual = g[k];  // the maximum may sit outside the sampled window
      return out;
    }
    if (g[k - 1] > 0.0 && g[k + 1] > 0.0) {
      // parabola through the three log values around the peak
      const double y0 = std::log(g[k - 1]), y1 = std::log(g[k]), y2 = std::log(g[k + 1]);
      const double curv = y0 - 2.0 * y1 + y2;
      if (curv < 0.0) {
        const double d = (y0 - y2) / (2.0 * curv);
        if (std::abs(d) <= 1.0) out.value = std::exp(y1 - 0.25 * d * (y0 - y2));
      }
    }
    out.residual = out.value - g[k];
    return out;
  }
  const double qq = exponent_value(q);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::pow(g[i], qq) * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
  sum *= ds;
  sum += std::pow(g[0], qq) * 2.0 / (sigma * qq);  // h roughly constant below t_min
  const double last = std::pow(g[n - 1], qq);
  const double tail = prof.k_min_sq > 0.0 ? last / (qq * prof.k_min_sq * prof.t[n - 1]) : last;
  out.value = std::pow(sum, 1.0 / qq);
  out.residual = std::pow(sum + tail, 1.0 / qq) - out.value;
  return out;
}

inline NormValue besov_norm_heat(const SpectralField& a, double sigma, Lp p, Lp q, const TimeGrid& tg,
                                 std::size_t padding = 2) {
  if (!(sigma > 0.0)) throw UsageError("heat-flow Besov norm needs sigma > 0");
  if (p == Lp::one) throw UsageError("p = 1 is not supported");
  if (detail::has_mean(a)) throw UsageError("heat-flow Besov norm of a field with nonzero mean diverges");
  return besov_from_profile(heat_profile(a, p, tg, padding), sigma, q);
}

// vector fields: max over components
inline NormValue besov_norm_heat(const SpectralVectorField& u, double sigma, Lp p, Lp q, const TimeGrid& tg,
                                 std::size_t padding = 2) {
  NormValue best;
  for (int i = 0; i < 3; ++i) {
    const NormValue v = besov_norm_heat(u[i], sigma, p, q, tg, padding);
    if (v.value > best.value || i == 0) best = v;
  }
  return best;
}

inline NormValue besov_norm_dyadic(const SpectralField& a, double sigma, Lp p, Lp q, const LPFilterBank& bank,
                                   std::size_t padding = 2) {
  if (!(sigma > 0.0)) throw UsageError("dyadic Besov norm needs sigma > 0");
  if (detail::has_mean(a)) throw UsageError("dyadic Besov norm of a field with nonzero mean");
  NormValue out;
  if (a.is_zero()) return out;
  const double qq = exponent_value(q);
  double acc = 0.0;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    const double term = std::pow(2.0, -j * sigma) * lebesgue_norm(bank.block(a, j), p, padding);
    if (q == Lp::inf) {
      acc = std::max(acc, term);
    } else {
      acc += std::pow(term, qq);
    }
  }
  out.value = q == Lp::inf ? acc : std::pow(acc, 1.0 / qq);
  out.residual = bank.residual(a);
  return out;
}

inline NormValue besov_norm_dyadic(const SpectralVectorField& u, double sigma, Lp p, Lp q,
                                   const LPFilterBank& bank, std::size_t padding = 2) {
  NormValue best;
  for (int i = 0; i < 3; ++i) {
    const NormValue v = besov_norm_dyadic(u[i], sigma, p, q, bank, padding);
    if (v.value > best.value || i == 0) best = v;
  }
  return best;
}

struct SobolevValue {
  double fourier = 0.0;
  double dyadic = 0.0;
  double ratio = 0.0;  // fourier / dyadic, 0 for the zero field
};

inline SobolevValue sobolev_norm(const SpectralField& a, double s, const LPFilterBank& bank) {
  if (s < 0.0 && detail::has_mean(a)) throw UsageError("negative-order Sobolev norm of a field with nonzero mean");
  SobolevValue out;
  double acc = 0.0;
  for_each_mode(a.grid(), [&](const Mode& m) {
    const double k2 = m.k2();
    if (k2 == 0.0 && s != 0.0) return;
    acc += m.weight * (s == 0.0 ? 1.0 : std::pow(k2, s)) * std::norm(a[m.index]);
  });
  out.fourier = std::sqrt(a.grid().volume() * acc);
  double dy = 0.0;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) dy += std::pow(2.0, 2.0 * j * s) * l2_norm_sq(bank.block(a, j));
  out.dyadic = std::sqrt(dy);
  out.ratio = out.dyadic > 0.0 ? out.fourier / out.dyadic : 0.0;
  return out;
}

inline SobolevValue sobolev_norm(const SpectralVectorField& u, double s, const LPFilterBank& bank) {
  SobolevValue out;
  double f = 0.0, d = 0.0;
  for (int i = 0; i < 3; ++i) {
    const SobolevValue v = sobolev_norm(u[i], s, bank);
    f += v.fourier * v.fourier;
    d += v.dyadic * v.dyadic;
  }
  out.fourier = std::sqrt(f);
  out.dyadic = std::sqrt(d);
  out.ratio = out.dyadic > 0.0 ? out.fourier / out.dyadic : 0.0;
  return out;
}

}  // namespace lsl
