#pragma once

#include <cmath>
#include <vector>

#include "lsl/field.hpp"

namespace lsl {

inline SpectralField derivative(const SpectralField& a, Axis axis, int order) {
  if (order != 1 && order != 2) throw UsageError("derivative order must be 1 or 2");
  SpectralField out(a.grid());
  const int ax = static_cast<int>(axis);
  for_each_mode(a.grid(), [&](const Mode& m) {
    out[m.index] = order == 1 ? cplx(0.0, m.ko[ax]) * a[m.index] : -m.k[ax] * m.k[ax] * a[m.index];
  });
  return out;
}

inline SpectralVectorField derivative(const SpectralVectorField& u, Axis axis, int order) {
  SpectralVectorField out(derivative(u[0], axis, order), derivative(u[1], axis, order),
                          derivative(u[2], axis, order));
  out.mark_divergence_free(u.divergence_free());
  return out;
}

inline SpectralField heat_flow(const SpectralField& a, double t) {
  if (!(t >= 0.0)) throw UsageError("heat flow needs t >= 0");
  SpectralField out(a.grid());
  for_each_mode(a.grid(), [&](const Mode& m) { out[m.index] = std::exp(-t * m.k2()) * a[m.index]; });
  return out;
}

inline SpectralVectorField heat_flow(const SpectralVectorField& u, double t) {
  if (!(t >= 0.0)) throw UsageError("heat flow needs t >= 0");
  SpectralVectorField out(u.grid());
  for_each_mode(u.grid(), [&](const Mode& m) {
    const double f = std::exp(-t * m.k2());
    for (int i = 0; i < 3; ++i) out[i][m.index] = f * u[i][m.index];
  });
  out.mark_divergence_free(u.divergence_free());
  return out;
}

// symbol delta_ij - k_i k_j / |k|^2 with the odd wavevector; k = 0 passes through
inline SpectralVectorField leray_project(const SpectralVectorField& v) {
  SpectralVectorField out(v.grid());
  for_each_mode(v.grid(), [&](const Mode& m) {
    const std::size_t i = m.index;
    const double kk = m.ko[0] * m.ko[0] + m.ko[1] * m.ko[1] + m.ko[2] * m.ko[2];
    if (kk == 0.0) {
      for (int c = 0; c < 3; ++c) out[c][i] = v[c][i];
      return;
    }
    const cplx dot = m.ko[0] * v[0][i] + m.ko[1] * v[1][i] + m.ko[2] * v[2][i];
    for (int c = 0; c < 3; ++c) out[c][i] = v[c][i] - (m.ko[c] / kk) * dot;
  });
  out.mark_divergence_free(true);
  return out;
}

inline SpectralField divergence(const SpectralVectorField& v) {
  SpectralField out(v.grid());
  for_each_mode(v.grid(), [&](const Mode& m) {
    const std::size_t i = m.index;
    out[i] = cplx(0.0, 1.0) * (m.ko[0] * v[0][i] + m.ko[1] * v[1][i] + m.ko[2] * v[2][i]);
  });
  return out;
}

// max|k.u(k)| / max|u|, the divergence-free test used throughout
inline double divergence_residual(const SpectralVectorField& v) {
  const double scale = v.max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for_each_mode(v.grid(), [&](const Mode& m) {
    const std::size_t i = m.index;
    worst = std::max(worst, std::abs(m.ko[0] * v[0][i] + m.ko[1] * v[1][i] + m.ko[2] * v[2][i]));
  });
  return worst / scale;
}

// ||a||_2^2 by Parseval
inline double l2_norm_sq(const SpectralField& a) {
  double s = 0.0;
  for_each_mode(a.grid(), [&](const Mode& m) { s += m.weight * std::norm(a[m.index]); });
  return a.grid().volume() * s;
}
inline double l2_norm_sq(const SpectralVectorField& u) {
  return l2_norm_sq(u[0]) + l2_norm_sq(u[1]) + l2_norm_sq(u[2]);
}

// ||grad a||_2^2, even symbol so that it matches the heat-flow dissipation
inline double gradient_norm_sq(const SpectralField& a) {
  double s = 0.0;
  for_each_mode(a.grid(), [&](const Mode& m) { s += m.weight * m.k2() * std::norm(a[m.index]); });
  return a.grid().volume() * s;
}
inline double gradient_norm_sq(const SpectralVectorField& u) {
  return gradient_norm_sq(u[0]) + gradient_norm_sq(u[1]) + gradient_norm_sq(u[2]);
}

// sum |c_k|, an upper bound for the sup norm
inline double l1_coeff_bound(const SpectralField& a) {
  double s = 0.0;
  for_each_mode(a.grid(), [&](const Mode& m) { s += m.weight * std::abs(a[m.index]); });
  return s;
}

// 2/3 rule per axis: keep |index| <= n/3
inline bool dealias_keep(const Grid& g, const Mode& m) {
  const long cut = static_cast<long>(g.n() / 3);
  return std::labs(g.signed_index(m.i0)) <= cut && std::labs(g.signed_index(m.i1)) <= cut &&
         static_cast<long>(m.i2) <= cut;
}

inline SpectralField dealias(const SpectralField& a) {
  SpectralField out(a.grid());
  for_each_mode(a.grid(), [&](const Mode& m) {
    if (dealias_keep(a.grid(), m)) out[m.index] = a[m.index];
  });
  return out;
}

namespace detail {

// u.grad u with u, grad u synthesized on grid (n*factor); the product is
// transformed back on that grid. With truncate set, inputs and output are
// restricted to the 2/3 set of the evaluation grid.
inline SpectralVectorField convective_product(const SpectralVectorField& u, std::size_t factor,
                                              bool truncate) {
  const Grid fine = u.grid().padded(factor);
  auto prep = [&](const SpectralField& a) {
    SpectralField p = pad(a, factor);
    return truncate ? dealias(p) : p;
  };
  std::vector<RealField> uj;
  std::vector<bool> live(3);
  uj.reserve(3);
  for (int j = 0; j < 3; ++j) {
    live[j] = !u[j].is_zero();
    uj.push_back(live[j] ? inverse(prep(u[j])) : RealField(fine));
  }
  SpectralVectorField out(fine);
  for (int i = 0; i < 3; ++i) {
    if (u[i].is_zero()) continue;
    RealField acc(fine);
    bool any = false;
    for (int j = 0; j < 3; ++j) {
      if (!live[j]) continue;
      SpectralField d = derivative(u[i], static_cast<Axis>(j), 1);
      if (d.is_zero()) continue;
      RealField dv = inverse(prep(d));
      const double* a = uj[j].data();
      const double* b = dv.data();
      double* s = acc.data();
      for (std::size_t p = 0; p < fine.physical_size(); ++p) s[p] += a[p] * b[p];
      any = true;
    }
    if (any) out[i] = truncate ? dealias(forward(acc)) : forward(acc);
  }
  return out;
}

}  // namespace detail

// u.grad u, pseudo-spectral with the 2/3 rule, on u's grid
inline SpectralVectorField advect(const SpectralVectorField& u) {
  return detail::convective_product(u, 1, true);
}

// u.grad u without truncation on a grid padded by factor (>= 2 is exact for
// any band-limited u); the result lives on the padded grid
inline SpectralVectorField advect_padded(const SpectralVectorField& u, std::size_t factor) {
  if (factor < 2) throw UsageError("exact products need padding >= 2");
  return detail::convective_product(u, factor, false);
}

}  // namespace lsl
