#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lsl/field.hpp"

namespace lsl {

// LSL1: "LSL1", u64 n (x3), f64 L, u64 ncomp, then for each component the
// full n^3 spectrum (row-major, index order of the FFT) as (re, im) f64
// pairs. Everything little-endian.

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char*>(&bits), 8);
}

template <class T>
T get_le(std::istream& is) {
  std::uint64_t bits = 0;
  if (!is.read(reinterpret_cast<char*>(&bits), 8)) throw UsageError("snapshot truncated");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

struct Snapshot {
  Grid grid;
  std::vector<SpectralField> components;
};

inline void write_snapshot(const std::string& path, const std::vector<SpectralField>& comps) {
  if (comps.empty()) throw UsageError("snapshot needs at least one component");
  const Grid g = comps.front().grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open " + path + " for writing");
  os.write("LSL1", 4);
  for (int i = 0; i < 3; ++i) detail::put_le<std::uint64_t>(os, g.n());
  detail::put_le<double>(os, g.box_len());
  detail::put_le<std::uint64_t>(os, comps.size());
  const std::size_t n = g.n();
  for (const auto& c : comps) {
    if (!(c.grid() == g)) throw UsageError("snapshot components on different grids");
    for (std::size_t i0 = 0; i0 < n; ++i0)
      for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2) {
          cplx v;
          if (i2 < g.half()) {
            v = c[g.index(i0, i1, i2)];
          } else {  // lower half from Hermitian symmetry
            v = std::conj(c[g.index((n - i0) % n, (n - i1) % n, n - i2)]);
          }
          detail::put_le<double>(os, v.real());
          detail::put_le<double>(os, v.imag());
        }
  }
  if (!os) throw UsageError("write failed for " + path);
}

inline void write_snapshot(const std::string& path, const SpectralVectorField& u) {
  write_snapshot(path, std::vector<SpectralField>{u[0], u[1], u[2]});
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "LSL1", 4) != 0) throw UsageError(path + ": not an LSL1 file");
  std::uint64_t dims[3];
  for (auto& d : dims) d = detail::get_le<std::uint64_t>(is);
  if (dims[0] != dims[1] || dims[0] != dims[2]) throw UsageError(path + ": only cubic grids are supported");
  if (dims[0] > 4096) throw UsageError(path + ": grid too large");
  const double L = detail::get_le<double>(is);
  const std::uint64_t ncomp = detail::get_le<std::uint64_t>(is);
  if (ncomp == 0 || ncomp > 16) throw UsageError(path + ": bad component count");
  Snapshot s{Grid(static_cast<std::size_t>(dims[0]), L), {}};
  const std::size_t n = s.grid.n();
  for (std::uint64_t c = 0; c < ncomp; ++c) {
    SpectralField f(s.grid);
    for (std::size_t i0 = 0; i0 < n; ++i0)
      for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2) {
          const double re = detail::get_le<double>(is);
          const double im = detail::get_le<double>(is);
          if (i2 < s.grid.half()) f[s.grid.index(i0, i1, i2)] = cplx(re, im);
        }
    s.components.push_back(std::move(f));
  }
  return s;
}

inline SpectralVectorField read_vector_snapshot(const std::string& path) {
  Snapshot s = read_snapshot(path);
  if (s.components.size() != 3) throw UsageError(path + ": expected 3 components");
  return SpectralVectorField(std::move(s.components[0]), std::move(s.components[1]), std::move(s.components[2]));
}

}  // namespace lsl
