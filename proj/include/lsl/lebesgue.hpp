#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lsl/operators.hpp"

namespace lsl {

enum class Lp { one = 1, two = 2, four = 4, inf = 0 };

inline double exponent_value(Lp p) {
  return p == Lp::inf ? std::numeric_limits<double>::infinity() : static_cast<double>(static_cast<int>(p));
}

inline std::string to_string(Lp p) {
  switch (p) {
    case Lp::one: return "1";
    case Lp::two: return "2";
    case Lp::four: return "4";
    case Lp::inf: return "inf";
  }
  return "?";
}

inline Lp parse_exponent(const std::string& s) {
  if (s == "1") return Lp::one;
  if (s == "2") return Lp::two;
  if (s == "4") return Lp::four;
  if (s == "inf" || s == "oo" || s == "infinity") return Lp::inf;
  throw UsageError("unsupported exponent '" + s + "'");
}

// L^p of grid samples with cell volume dv; p = inf is the max
inline double sample_norm(const double* v, std::size_t count, Lp p, double dv) {
  if (p == Lp::inf) {
    double m = 0.0;
    for (std::size_t i = 0; i < count; ++i) m = std::max(m, std::abs(v[i]));
    return m;
  }
  double s = 0.0;
  switch (p) {
    case Lp::one:
      for (std::size_t i = 0; i < count; ++i) s += std::abs(v[i]);
      return s * dv;
    case Lp::two:
      for (std::size_t i = 0; i < count; ++i) s += v[i] * v[i];
      return std::sqrt(s * dv);
    default:
      for (std::size_t i = 0; i < count; ++i) {
        const double q = v[i] * v[i];
        s += q * q;
      }
      return std::pow(s * dv, 0.25);
  }
}

namespace detail {

// max |f| over the samples, with each near-maximal local peak moved off the
// lattice by one Newton step on the 27-point quadratic fit. The grid max alone
// undershoots by O((kh)^2) and breaks exact scaling relations.
inline double refined_sup(const RealField& r) {
  const std::size_t n = r.grid().n();
  const double* v = r.data();
  double top = 0.0;
  for (std::size_t i = 0; i < r.grid().physical_size(); ++i) top = std::max(top, std::abs(v[i]));
  if (top == 0.0 || n < 3) return top;
  auto wrap = [n](std::size_t j, int d) { return (j + n + d) % n; };
  double best = top;
  const double floor = 0.9 * top;
  for (std::size_t p = 0; p < r.grid().physical_size(); ++p) {
    const double f0 = v[p];
    if (std::abs(f0) < floor) continue;
    // x3 fastest
    const std::size_t j2 = p % n, j1 = (p / n) % n, j0 = p / (n * n);
    const double s = f0 > 0.0 ? 1.0 : -1.0;
    auto at = [&](int d0, int d1, int d2) { return s * v[r.grid().point(wrap(j0, d0), wrap(j1, d1), wrap(j2, d2))]; };
    const double c = s * f0;
    double g[3], h[3][3];
    const int e[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    bool peak = true;
    for (int i = 0; i < 3; ++i) {
      const double fp = at(e[i][0], e[i][1], e[i][2]), fm = at(-e[i][0], -e[i][1], -e[i][2]);
      peak = peak && fp <= c && fm <= c;
      g[i] = 0.5 * (fp - fm);
      h[i][i] = fp - 2.0 * c + fm;
    }
    if (!peak) continue;
    for (int i = 0; i < 3; ++i)
      for (int k = i + 1; k < 3; ++k) {
        const int a0 = e[i][0] + e[k][0], a1 = e[i][1] + e[k][1], a2 = e[i][2] + e[k][2];
        const int b0 = e[i][0] - e[k][0], b1 = e[i][1] - e[k][1], b2 = e[i][2] - e[k][2];
        h[i][k] = h[k][i] = 0.25 * (at(a0, a1, a2) - at(b0, b1, b2) - at(-b0, -b1, -b2) + at(-a0, -a1, -a2));
      }
    // -H = L L^T, else no interior maximum of the fit
    double l[3][3] = {};
    bool definite = true;
    for (int i = 0; i < 3 && definite; ++i)
      for (int k = 0; k <= i; ++k) {
        double sum = -h[i][k];
        for (int m = 0; m < k; ++m) sum -= l[i][m] * l[k][m];
        if (i == k) {
          if (sum <= 0.0) {
            definite = false;
            break;
          }
          l[i][i] = std::sqrt(sum);
        } else {
          l[i][k] = sum / l[k][k];
        }
      }
    if (!definite) continue;
    // (-H) d = g
    double y[3], d[3];
    for (int i = 0; i < 3; ++i) {
      y[i] = g[i];
      for (int m = 0; m < i; ++m) y[i] -= l[i][m] * y[m];
      y[i] /= l[i][i];
    }
    for (int i = 2; i >= 0; --i) {
      d[i] = y[i];
      for (int m = i + 1; m < 3; ++m) d[i] -= l[m][i] * d[m];
      d[i] /= l[i][i];
    }
    if (std::abs(d[0]) > 1.0 || std::abs(d[1]) > 1.0 || std::abs(d[2]) > 1.0) continue;
    best = std::max(best, c + 0.5 * (g[0] * d[0] + g[1] * d[1] + g[2] * d[2]));
  }
  return best;
}

}  // namespace detail

// p = 2 by Parseval; otherwise by quadrature on a zero-padded grid (the sup
// refined between samples)
inline double lebesgue_norm(const SpectralField& a, Lp p, std::size_t padding = 2) {
  if (p == Lp::two) return std::sqrt(l2_norm_sq(a));
  if (a.is_zero()) return 0.0;
  const RealField r = inverse_padded(a, padding);
  if (p == Lp::inf) return detail::refined_sup(r);
  const double h = r.grid().spacing();
  return sample_norm(r.data(), r.grid().physical_size(), p, h * h * h);
}

// Euclidean for L^2, componentwise max otherwise
inline double lebesgue_norm(const SpectralVectorField& u, Lp p, std::size_t padding = 2) {
  if (p == Lp::two) return std::sqrt(l2_norm_sq(u));
  double m = 0.0;
  for (int i = 0; i < 3; ++i) m = std::max(m, lebesgue_norm(u[i], p, padding));
  return m;
}

// L^{p_vertical}(dx3; L^{p_horizontal}(dx1 dx2)), vertical outer
struct MixedNormSpec {
  Lp vertical;
  Lp horizontal;

  void validate() const {
    const bool ok = (vertical == Lp::inf && horizontal == Lp::two) ||
                    (vertical == Lp::two && horizontal == Lp::four) ||
                    (vertical == Lp::inf && horizontal == Lp::four);
    if (!ok)
      throw UsageError("unsupported mixed norm L" + to_string(vertical) + "_v L" + to_string(horizontal) + "_h");
  }
};

inline double mixed_norm(const SpectralField& a, const MixedNormSpec& spec, std::size_t padding = 2) {
  spec.validate();
  if (a.is_zero()) return 0.0;
  const RealField r = inverse_padded(a, padding);
  const std::size_t n = r.grid().n();
  const double h = r.grid().spacing();
  const double hp = exponent_value(spec.horizontal);
  // x3 is the fastest index: accumulate each horizontal plane's sum at once
  std::vector<double> plane(n, 0.0);
  for (std::size_t j01 = 0; j01 < n * n; ++j01) {
    const double* row = r.data() + j01 * n;
    for (std::size_t j2 = 0; j2 < n; ++j2) plane[j2] += std::pow(std::abs(row[j2]), hp);
  }
  for (auto& v : plane) v = std::pow(v * h * h, 1.0 / hp);
  return sample_norm(plane.data(), n, spec.vertical, h);
}

}  // namespace lsl
