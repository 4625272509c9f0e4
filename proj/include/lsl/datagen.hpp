#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "lsl/littlewood_paley.hpp"
#include "lsl/norm_report.hpp"
#include "lsl/operators.hpp"

namespace lsl {

// Smooth profile phi(y1, y2, y3) in centred coordinates y = x - L/2.
//  compact:  tensor product of exp(1 - 1/(1 - s^2)), s = y/r, support |y_i| < r
//  resolved: cos^2(pi y1/L) exp(-y2^2/(2 w^2)) cos^2(pi y3/L)
// The second one is not compactly supported in x2, but its Gaussian factor is
// what survives the x2-stretch; it keeps the spectrum inside a 128^3 grid
// where the compact bump would not be.
class BumpProfile {
 public:
  enum class Shape { compact, resolved };

  static BumpProfile compact(double box_len, double radius = 0.0) {
    if (radius == 0.0) radius = box_len / 8.0;
    if (!(radius > 0.0) || radius > box_len / 4.0) throw UsageError("bump radius must lie in (0, L/4]");
    return BumpProfile(Shape::compact, box_len, radius);
  }
  static BumpProfile resolved(double box_len, double width) {
    if (!(width > 0.0)) throw UsageError("profile width must be positive");
    return BumpProfile(Shape::resolved, box_len, width);
  }

  Shape shape() const { return shape_; }
  double box_len() const { return L_; }
  // x2 length scale before stretching
  double scale() const { return r_; }

  double value(double y1, double y2, double y3) const { return a(y1) * b(y2) * a(y3); }
  double d2(double y1, double y2, double y3) const { return a(y1) * db(y2) * a(y3); }
  double d3(double y1, double y2, double y3) const { return a(y1) * b(y2) * da(y3); }

 private:
  BumpProfile(Shape s, double L, double r) : shape_(s), L_(L), r_(r) {}

  static double bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }
  static double dbump(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return bump(s) * (-2.0 * s / (q * q));
  }

  // x1/x3 factor
  double a(double y) const {
    if (shape_ == Shape::compact) return bump(y / r_);
    const double c = std::cos(pi * y / L_);
    return c * c;
  }
  double da(double y) const {
    if (shape_ == Shape::compact) return dbump(y / r_) / r_;
    return -(pi / L_) * std::sin(2.0 * pi * y / L_);
  }
  // x2 factor
  double b(double y) const {
    if (shape_ == Shape::compact) return bump(y / r_);
    return std::exp(-0.5 * y * y / (r_ * r_));
  }
  double db(double y) const {
    if (shape_ == Shape::compact) return dbump(y / r_) / r_;
    return -y / (r_ * r_) * b(y);
  }

  Shape shape_;
  double L_, r_;
};

namespace detail {

inline double centred(double x, double L) { return x - 0.5 * L; }

// stretched x2 argument summed over periodic images, so the field is
// exactly L-periodic whatever the stretch
template <class F>
double periodized(F&& f, double y2, double stretch, double L) {
  double s = 0.0;
  for (int m = -2; m <= 2; ++m) s += f((y2 + m * L) / stretch);
  return s;
}

inline void require_lattice_frequency(const Grid& g, double eps) {
  const double m = 1.0 / (eps * g.k_unit());
  if (std::abs(m - std::round(m)) > 1e-9 * m || std::round(m) < 1.0)
    throw UsageError("1/eps is not a lattice wavenumber of this box");
  if (1.0 / eps >= g.nyquist()) throw UsageError("1/eps is at or beyond the Nyquist wavenumber");
}

}  // namespace detail

struct ModulatedField {
  SpectralField f;
  double dc_removed = 0.0;  // |mean| taken out after sampling
};

// f_eps(x) = cos(y1/eps) phi(y1, y2/eps^alpha, y3)
inline ModulatedField modulate(const BumpProfile& phi, double eps, double alpha, const Grid& g) {
  if (!(eps > 0.0 && eps <= 1.0)) throw UsageError("eps must lie in (0, 1]");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in [0, 1)");
  detail::require_lattice_frequency(g, eps);
  const double L = g.box_len(), stretch = std::pow(eps, alpha);
  ModulatedField out{sample(g,
                            [&](double x1, double x2, double x3) {
                              const double y1 = detail::centred(x1, L), y2 = detail::centred(x2, L),
                                           y3 = detail::centred(x3, L);
                              const double v = detail::periodized(
                                  [&](double s) { return phi.value(y1, s, y3); }, y2, stretch, L);
                              return std::cos(y1 / eps) * v;
                            }),
                     0.0};
  out.dc_removed = std::abs(out.f[0]);
  out.f[0] = cplx{};
  return out;
}

struct OscillatoryParams {
  double eps = 0.125;
  double alpha = 0.75;
  double kappa = 0.25;
  double eta = 0.5;
  double c0_const = 0.5;
  std::optional<double> frozen_amplitude;  // overrides A_eps when set

  // A_eps = (kappa |log eps| / C0)^{1/2}
  double amplitude() const {
    return frozen_amplitude ? *frozen_amplitude : std::sqrt(kappa * std::abs(std::log(eps)) / c0_const);
  }

  void validate(const Grid& g, const BumpProfile& phi) const {
    if (!(eps > 0.0 && eps < 1.0)) throw UsageError("eps must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    if (!(eta > 0.0 && eta < 1.0)) throw UsageError("eta must lie in (0, 1)");
    if (!(kappa > 0.0 && kappa < eta)) throw UsageError("kappa must lie in (0, eta)");
    if (!(c0_const > 0.0)) throw UsageError("C0 must be positive");
    if (frozen_amplitude && !(*frozen_amplitude > 0.0)) throw UsageError("frozen amplitude must be positive");
    detail::require_lattice_frequency(g, eps);
    if (std::pow(eps, -alpha) / phi.scale() > g.nyquist() / 4.0)
      throw UsageError("x2 scale eps^alpha is under-resolved on this grid");
    if (!frozen_amplitude && amplitude() < 1.0) throw UsageError("A_eps < 1 for these kappa, C0");
  }
};

enum class Construction { projected, pointwise, stream };

inline Construction parse_construction(const std::string& s) {
  if (s == "projected") return Construction::projected;
  if (s == "pointwise") return Construction::pointwise;
  if (s == "stream") return Construction::stream;
  throw UsageError("unknown construction '" + s + "'");
}

struct OscillatoryData {
  SpectralVectorField u0;
  double div_residual = 0.0;  // of the sampled field, before any projection
  double dc_removed = 0.0;
  double amplitude = 0.0;
};

// u0 = (A/eps) (0, eps^alpha cos(y1/eps)(-d3 phi)_eps, cos(y1/eps)(d2 phi)_eps)
// which is (0, -d3 psi, d2 psi) for psi = (A/eps) eps^alpha cos(y1/eps) phi_eps.
inline OscillatoryData make_oscillatory_data(const OscillatoryParams& p, const BumpProfile& phi, const Grid& g,
                                             Construction how = Construction::projected) {
  p.validate(g, phi);
  const double L = g.box_len(), eps = p.eps, st = std::pow(eps, p.alpha);
  const double A = p.amplitude();
  auto pt = [&](double x1, double x2, double x3, auto&& prof) {
    const double y1 = detail::centred(x1, L), y2 = detail::centred(x2, L), y3 = detail::centred(x3, L);
    return std::cos(y1 / eps) * detail::periodized([&](double s) { return prof(y1, s, y3); }, y2, st, L);
  };
  OscillatoryData out{SpectralVectorField(g), 0.0, 0.0, A};
  if (how == Construction::stream) {
    SpectralField psi = sample(g, [&](double x1, double x2, double x3) {
      return (A / eps) * st * pt(x1, x2, x3, [&](double a, double b, double c) { return phi.value(a, b, c); });
    });
    out.u0 = SpectralVectorField(SpectralField(g), -1.0 * derivative(psi, Axis::x3, 1), derivative(psi, Axis::x2, 1));
  } else {
    SpectralField u2 = sample(g, [&](double x1, double x2, double x3) {
      return -(A / eps) * st * pt(x1, x2, x3, [&](double a, double b, double c) { return phi.d3(a, b, c); });
    });
    SpectralField u3 = sample(g, [&](double x1, double x2, double x3) {
      return (A / eps) * pt(x1, x2, x3, [&](double a, double b, double c) { return phi.d2(a, b, c); });
    });
    out.u0 = SpectralVectorField(SpectralField(g), std::move(u2), std::move(u3));
  }
  for (int c = 0; c < 3; ++c) {
    out.dc_removed = std::max(out.dc_removed, std::abs(out.u0[c][0]));
    out.u0[c][0] = cplx{};
  }
  out.div_residual = divergence_residual(out.u0);
  if (out.div_residual > 1e-4)
    throw UsageError("sampled data not divergence-free (under-resolved parameters), residual " +
                     format_number(out.div_residual));
  if (how == Construction::projected) out.u0 = leray_project(out.u0);
  if (how == Construction::stream) out.u0.mark_divergence_free(true);
  if (how == Construction::pointwise) out.u0.mark_divergence_free(out.div_residual <= 1e-10);
  return out;
}

// share of the energy carried by modes with | |k1| - center | <= halfwidth
inline double x1_band_fraction(const SpectralVectorField& u, double center, double halfwidth) {
  double in = 0.0, all = 0.0;
  for_each_mode(u.grid(), [&](const Mode& m) {
    const double e = m.weight * (std::norm(u[0][m.index]) + std::norm(u[1][m.index]) + std::norm(u[2][m.index]));
    all += e;
    if (std::abs(std::abs(m.k[0]) - center) <= halfwidth) in += e;
  });
  return all > 0.0 ? in / all : 0.0;
}

namespace detail {

// Gaussian coefficients on 2^j_lo <= |k| < 2^{j_hi+1}, Nyquist planes excluded
template <class Fill>
std::size_t fill_band(const Grid& g, int j_lo, int j_hi, Fill&& fill) {
  const LPFilterBank bank(g);
  if (j_lo > j_hi) throw UsageError("empty band: j_lo > j_hi");
  if (j_lo < bank.j_min() || j_hi > bank.j_max()) throw UsageError("band outside the resolved annuli");
  const double lo = std::ldexp(1.0, j_lo), hi = std::ldexp(1.0, j_hi + 1);
  const std::size_t nyq = g.n() / 2;
  std::size_t count = 0;
  for_each_mode(g, [&](const Mode& m) {
    if (m.i0 == nyq || m.i1 == nyq || m.i2 == nyq) return;
    const double k = std::sqrt(m.k2());
    if (k < lo || k >= hi) return;
    fill(m.index);
    ++count;
  });
  if (count == 0) throw UsageError("empty band: no lattice modes in it");
  return count;
}

}  // namespace detail

inline SpectralVectorField make_divfree_random(const Grid& g, std::uint64_t seed, int j_lo, int j_hi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralVectorField u(g);
  detail::fill_band(g, j_lo, j_hi, [&](std::size_t i) {
    for (int c = 0; c < 3; ++c) {
      const double re = gauss(rng), im = gauss(rng);
      u[c][i] = cplx(re, im);
    }
  });
  for (int c = 0; c < 3; ++c) {
    enforce_hermitian(u[c]);
    u[c][0] = cplx{};
  }
  return leray_project(u);
}

inline SpectralField make_random_scalar(const Grid& g, std::uint64_t seed, int j_lo, int j_hi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField a(g);
  detail::fill_band(g, j_lo, j_hi, [&](std::size_t i) {
    const double re = gauss(rng), im = gauss(rng);
    a[i] = cplx(re, im);
  });
  enforce_hermitian(a);
  a[0] = cplx{};
  return a;
}

// (cos x2 cos x3, cos x1, 0) on the 2pi-box: divergence-free, genuinely 3D,
// and P(u_L.grad u_L) is a single decaying mode family with closed-form norms
inline SpectralVectorField fixture_flow(const Grid& g, double amplitude = 1.0) {
  const double k = g.k_unit();
  SpectralVectorField u(sample(g, [&](double, double x2, double x3) { return amplitude * std::cos(k * x2) * std::cos(k * x3); }),
                        sample(g, [&](double x1, double, double) { return amplitude * std::cos(k * x1); }),
                        SpectralField(g));
  u.mark_divergence_free(true);
  return u;
}

// (g(x3), 0, 0) shear with g = cos: an exact solution with zero nonlinearity
inline SpectralVectorField shear_flow(const Grid& g, double amplitude = 1.0, Axis along = Axis::x3) {
  const double k = g.k_unit();
  const int ax = static_cast<int>(along);
  if (ax == 0) throw UsageError("shear along x1 would not be divergence-free");
  SpectralVectorField u(sample(g,
                               [&](double x1, double x2, double x3) {
                                 const double x[3] = {x1, x2, x3};
                                 return amplitude * std::cos(k * x[ax]);
                               }),
                        SpectralField(g), SpectralField(g));
  u.mark_divergence_free(true);
  return u;
}

}  // namespace lsl
