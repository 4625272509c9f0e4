#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lsl {

inline constexpr double pi = std::numbers::pi;

// bad sizes, out-of-range parameters, malformed config: exit code 2 in the CLI
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// non-finite values, loss of resolution: exit code 3
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Axis : int { x1 = 0, x2 = 1, x3 = 2 };

// Periodic box [0,L)^3 with n points per axis. Spectral storage is the r2c
// half spectrum: axes 0 and 1 full (n), axis 2 halved (n/2 + 1).
class Grid {
 public:
  explicit Grid(std::size_t n, double box_len = 2.0 * pi) : n_(n), box_len_(box_len) {
    if (n < 8 || (n & (n - 1)) != 0)
      throw UsageError("grid size must be a power of two >= 8, got " + std::to_string(n));
    if (!(box_len > 0.0) || !std::isfinite(box_len))
      throw UsageError("box length must be positive and finite");
  }

  std::size_t n() const { return n_; }
  std::size_t half() const { return n_ / 2 + 1; }
  double box_len() const { return box_len_; }
  double spacing() const { return box_len_ / static_cast<double>(n_); }
  double k_unit() const { return 2.0 * pi / box_len_; }
  double nyquist() const { return static_cast<double>(n_ / 2) * k_unit(); }
  double volume() const { return box_len_ * box_len_ * box_len_; }
  std::size_t spectral_size() const { return n_ * n_ * half(); }
  std::size_t physical_size() const { return n_ * n_ * n_; }

  // storage position -> signed lattice index; the Nyquist slot maps to +n/2
  long signed_index(std::size_t i) const {
    return i <= n_ / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n_);
  }
  // even symbols (Laplacian, heat) see the Nyquist mode
  double wavenumber(std::size_t i) const { return static_cast<double>(signed_index(i)) * k_unit(); }
  // odd symbols (first derivatives) drop it: its sign is ambiguous on the grid
  double odd_wavenumber(std::size_t i) const { return i == n_ / 2 ? 0.0 : wavenumber(i); }

  std::size_t index(std::size_t i0, std::size_t i1, std::size_t i2) const {
    return (i0 * n_ + i1) * half() + i2;
  }
  std::size_t point(std::size_t j0, std::size_t j1, std::size_t j2) const {
    return (j0 * n_ + j1) * n_ + j2;
  }

  // storage position of a signed index on a full axis
  std::size_t slot(long s) const {
    return static_cast<std::size_t>(s >= 0 ? s : s + static_cast<long>(n_));
  }

  Grid padded(std::size_t factor) const {
    if (factor == 0) throw UsageError("padding factor must be >= 1");
    return Grid(n_ * factor, box_len_);
  }

  bool operator==(const Grid& o) const { return n_ == o.n_ && box_len_ == o.box_len_; }

 private:
  std::size_t n_;
  double box_len_;
};

struct Mode {
  std::size_t index, i0, i1, i2;
  double k[3];    // even-symbol wavevector
  double ko[3];   // odd-symbol wavevector
  double weight;  // multiplicity in the half spectrum (1 or 2)
  double k2() const { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }
};

template <class F>
void for_each_mode(const Grid& g, F&& f) {
  const std::size_t n = g.n(), h = g.half();
  Mode m{};
  m.index = 0;
  for (std::size_t i0 = 0; i0 < n; ++i0) {
    m.i0 = i0;
    m.k[0] = g.wavenumber(i0);
    m.ko[0] = g.odd_wavenumber(i0);
    for (std::size_t i1 = 0; i1 < n; ++i1) {
      m.i1 = i1;
      m.k[1] = g.wavenumber(i1);
      m.ko[1] = g.odd_wavenumber(i1);
      for (std::size_t i2 = 0; i2 < h; ++i2) {
        m.i2 = i2;
        m.k[2] = g.wavenumber(i2);
        m.ko[2] = g.odd_wavenumber(i2);
        m.weight = (i2 == 0 || i2 == n / 2) ? 1.0 : 2.0;
        f(static_cast<const Mode&>(m));
        ++m.index;
      }
    }
  }
}

// f(index, x1, x2, x3) with x = j*h
template <class F>
void for_each_point(const Grid& g, F&& f) {
  const std::size_t n = g.n();
  const double h = g.spacing();
  std::size_t idx = 0;
  for (std::size_t j0 = 0; j0 < n; ++j0)
    for (std::size_t j1 = 0; j1 < n; ++j1)
      for (std::size_t j2 = 0; j2 < n; ++j2, ++idx)
        f(idx, static_cast<double>(j0) * h, static_cast<double>(j1) * h, static_cast<double>(j2) * h);
}

}  // namespace lsl
