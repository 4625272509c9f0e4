#pragma once

#include <fftw3.h>
#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <new>
#include <vector>

namespace lsl {

template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() noexcept = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t count) {
    if (count == 0) return nullptr;
    void* p = fftw_malloc(count * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept {
    if (p) fftw_free(p);
  }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept {
    return true;
  }
};

using cplx = std::complex<double>;
using RealBuffer = std::vector<double, FftwAllocator<double>>;
using ComplexBuffer = std::vector<cplx, FftwAllocator<cplx>>;

namespace detail {

struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

// The planner is not thread safe; plans are created once per size and kept
// for the life of the process. FFTW_ESTIMATE keeps plan choice (and hence
// rounding) independent of machine load.
inline const PlanPair& plans(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  const int ni = static_cast<int>(n);
  RealBuffer r(n * n * n);
  ComplexBuffer c(n * n * (n / 2 + 1));
  auto* cc = reinterpret_cast<fftw_complex*>(c.data());
  PlanPair p{fftw_plan_dft_r2c_3d(ni, ni, ni, r.data(), cc, FFTW_ESTIMATE),
             fftw_plan_dft_c2r_3d(ni, ni, ni, cc, r.data(), FFTW_ESTIMATE)};
  return cache.emplace(n, p).first->second;
}

}  // namespace detail

// unnormalized r2c; input untouched
inline void fft_r2c(std::size_t n, const double* in, cplx* out) {
  fftw_execute_dft_r2c(detail::plans(n).forward, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

// unnormalized c2r; destroys its input
inline void fft_c2r(std::size_t n, cplx* in, double* out) {
  fftw_execute_dft_c2r(detail::plans(n).backward, reinterpret_cast<fftw_complex*>(in), out);
}

// Grid-sized buffers sit above glibc's default mmap threshold, so every
// temporary is a fresh mapping and gets page-faulted in again. Keeping them
// on the heap roughly halves the wall time of the norm loops. Call once from
// main; a no-op elsewhere.
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

}  // namespace lsl
