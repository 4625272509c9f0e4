#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "lsl/fft.hpp"
#include "lsl/grid.hpp"

namespace lsl {

class RealField {
 public:
  explicit RealField(const Grid& g) : grid_(g), values_(g.physical_size(), 0.0) {}
  const Grid& grid() const { return grid_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

 private:
  Grid grid_;
  RealBuffer values_;
};

// Fourier coefficients c_k = n^-3 sum_x a(x) e^{-ik.x} of a real field, so
// a(x) = sum_k c_k e^{ik.x} and ||a||_2^2 = L^3 sum_k |c_k|^2.
class SpectralField {
 public:
  explicit SpectralField(const Grid& g) : grid_(g), coeffs_(g.spectral_size(), cplx{}) {}

  const Grid& grid() const { return grid_; }
  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }
  const cplx& operator[](std::size_t i) const { return coeffs_[i]; }
  cplx* data() { return coeffs_.data(); }
  const cplx* data() const { return coeffs_.data(); }
  std::size_t size() const { return coeffs_.size(); }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& c) { return c == cplx{}; });
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  SpectralField& operator+=(const SpectralField& o) {
    check(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  void check(const SpectralField& o) const {
    if (!(o.grid_ == grid_)) throw UsageError("grid mismatch in field arithmetic");
  }
  Grid grid_;
  ComplexBuffer coeffs_;
};

class SpectralVectorField {
 public:
  explicit SpectralVectorField(const Grid& g) : c_{SpectralField(g), SpectralField(g), SpectralField(g)} {}
  SpectralVectorField(SpectralField a, SpectralField b, SpectralField c)
      : c_{std::move(a), std::move(b), std::move(c)} {
    if (!(c_[0].grid() == c_[1].grid()) || !(c_[0].grid() == c_[2].grid()))
      throw UsageError("vector components live on different grids");
  }

  const Grid& grid() const { return c_[0].grid(); }
  SpectralField& operator[](std::size_t i) { return c_[i]; }
  const SpectralField& operator[](std::size_t i) const { return c_[i]; }

  bool divergence_free() const { return div_free_; }
  void mark_divergence_free(bool v = true) { div_free_ = v; }
  bool is_zero() const { return c_[0].is_zero() && c_[1].is_zero() && c_[2].is_zero(); }
  double max_abs() const { return std::max({c_[0].max_abs(), c_[1].max_abs(), c_[2].max_abs()}); }

  SpectralVectorField& operator+=(const SpectralVectorField& o) {
    for (int i = 0; i < 3; ++i) c_[i] += o.c_[i];
    div_free_ = div_free_ && o.div_free_;
    return *this;
  }
  SpectralVectorField& operator-=(const SpectralVectorField& o) {
    for (int i = 0; i < 3; ++i) c_[i] -= o.c_[i];
    div_free_ = div_free_ && o.div_free_;
    return *this;
  }
  SpectralVectorField& operator*=(double s) {
    for (auto& c : c_) c *= s;
    return *this;
  }
  friend SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) { return a += b; }
  friend SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) { return a -= b; }
  friend SpectralVectorField operator*(double s, SpectralVectorField a) { return a *= s; }

 private:
  std::array<SpectralField, 3> c_;
  bool div_free_ = false;
};

inline SpectralField forward(std::span<const double> values, const Grid& g) {
  if (values.size() != g.physical_size())
    throw UsageError("forward: " + std::to_string(values.size()) + " values for a grid of " +
                     std::to_string(g.physical_size()));
  SpectralField out(g);
  RealBuffer tmp(values.begin(), values.end());  // keeps the plan's alignment
  fft_r2c(g.n(), tmp.data(), out.data());
  const double s = 1.0 / static_cast<double>(g.physical_size());
  for (auto& c : out.coeffs()) c *= s;
  return out;
}

inline SpectralField forward(const RealField& f) {
  SpectralField out(f.grid());
  fft_r2c(f.grid().n(), f.data(), out.data());
  const double s = 1.0 / static_cast<double>(f.grid().physical_size());
  for (auto& c : out.coeffs()) c *= s;
  return out;
}

inline RealField inverse(const SpectralField& a) {
  RealField out(a.grid());
  ComplexBuffer tmp(a.coeffs().begin(), a.coeffs().end());
  fft_c2r(a.grid().n(), tmp.data(), out.data());
  return out;
}

// Zero-pads the spectrum onto an (f*n)^3 grid. A Nyquist coefficient stands
// for cos(N x) on the coarse grid, so it is split evenly between +N and -N
// (on the halved axis the -N partner is implicit, hence just the factor 1/2).
inline SpectralField pad(const SpectralField& a, std::size_t factor) {
  const Grid& g = a.grid();
  if (factor == 1) return a;
  const Grid fine = g.padded(factor);
  SpectralField out(fine);
  const std::size_t n = g.n();
  const long nyq = static_cast<long>(n / 2);
  for_each_mode(g, [&](const Mode& m) {
    const cplx c = a[m.index];
    if (c == cplx{}) return;
    const long s0 = g.signed_index(m.i0), s1 = g.signed_index(m.i1);
    const long s2 = static_cast<long>(m.i2);
    const int n0 = s0 == nyq ? 2 : 1, n1 = s1 == nyq ? 2 : 1;
    double w = (n0 == 2 ? 0.5 : 1.0) * (n1 == 2 ? 0.5 : 1.0) * (s2 == nyq ? 0.5 : 1.0);
    for (int a0 = 0; a0 < n0; ++a0)
      for (int a1 = 0; a1 < n1; ++a1) {
        const long t0 = a0 ? -s0 : s0, t1 = a1 ? -s1 : s1;
        out[fine.index(fine.slot(t0), fine.slot(t1), static_cast<std::size_t>(s2))] += w * c;
      }
  });
  return out;
}

inline RealField inverse_padded(const SpectralField& a, std::size_t factor) {
  return factor == 1 ? inverse(a) : inverse(pad(a, factor));
}

// f(x1, x2, x3) sampled at grid points, then transformed
template <class F>
SpectralField sample(const Grid& g, F&& f) {
  RealField r(g);
  for_each_point(g, [&](std::size_t i, double x1, double x2, double x3) { r[i] = f(x1, x2, x3); });
  return forward(r);
}

// Max violation of c(-k) = conj(c(k)) on the self-conjugate planes, relative
// to the largest coefficient. Off those planes the half spectrum is
// Hermitian by construction.
inline double hermitian_defect(const SpectralField& a) {
  const Grid& g = a.grid();
  const std::size_t n = g.n();
  double worst = 0.0;
  for (std::size_t i2 : {std::size_t{0}, n / 2})
    for (std::size_t i0 = 0; i0 < n; ++i0)
      for (std::size_t i1 = 0; i1 < n; ++i1) {
        const std::size_t j0 = (n - i0) % n, j1 = (n - i1) % n;
        worst = std::max(worst, std::abs(a[g.index(i0, i1, i2)] - std::conj(a[g.index(j0, j1, i2)])));
      }
  const double scale = a.max_abs();
  return scale > 0.0 ? worst / scale : 0.0;
}

inline void enforce_hermitian(SpectralField& a) {
  const Grid& g = a.grid();
  const std::size_t n = g.n();
  for (std::size_t i2 : {std::size_t{0}, n / 2})
    for (std::size_t i0 = 0; i0 < n; ++i0)
      for (std::size_t i1 = 0; i1 < n; ++i1) {
        const std::size_t p = g.index(i0, i1, i2);
        const std::size_t q = g.index((n - i0) % n, (n - i1) % n, i2);
        if (q < p) continue;
        const cplx avg = 0.5 * (a[p] + std::conj(a[q]));
        a[p] = avg;
        a[q] = std::conj(avg);
      }
}

}  // namespace lsl
