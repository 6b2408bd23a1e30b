#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include "heatlab/core/grid.hpp"

namespace heatlab {

// Thin wrapper over FFTW c2c transforms with a process-wide plan cache.
// Plans are created with FFTW_UNALIGNED so they can be replayed on any
// buffer; fftw_execute_dft on a cached plan is thread-safe, plan creation
// is serialized behind a mutex.
namespace fft_detail {

struct PlanKey {
  std::vector<int> dims;
  int sign;
  bool operator<(const PlanKey& o) const {
    if (sign != o.sign) return sign < o.sign;
    return dims < o.dims;
  }
};

inline fftw_plan plan_for(const std::vector<int>& dims, int sign,
                          std::complex<double>* in, std::complex<double>* out) {
  static std::map<PlanKey, fftw_plan> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  PlanKey key{dims, sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(),
                              reinterpret_cast<fftw_complex*>(in),
                              reinterpret_cast<fftw_complex*>(out), sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, p);
  return p;
}

}  // namespace fft_detail

/// In-order c2c transform of a row-major d-dimensional array. out may not
/// alias in. sign = FFTW_FORWARD or FFTW_BACKWARD; the backward transform is
/// unnormalized (scale by 1/N to invert).
inline void fft_c2c(const std::vector<int>& dims, std::complex<double>* in,
                    std::complex<double>* out, int sign) {
  fftw_plan p = fft_detail::plan_for(dims, sign, in, out);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in),
                   reinterpret_cast<fftw_complex*>(out));
}

/// Forward transform of real samples on a SpaceGrid.
inline std::vector<std::complex<double>> fft_forward(const SpaceGrid& grid,
                                                     const double* values) {
  const std::int64_t nn = grid.node_count();
  std::vector<std::complex<double>> in(nn), out(nn);
  for (std::int64_t i = 0; i < nn; ++i) in[i] = values[i];
  std::vector<int> dims(grid.dim(), grid.points_per_axis());
  fft_c2c(dims, in.data(), out.data(), FFTW_FORWARD);
  return out;
}

/// Inverse transform; writes the real part of the normalized result.
inline void fft_inverse_real(const SpaceGrid& grid,
                             std::vector<std::complex<double>>& spectrum,
                             double* values) {
  const std::int64_t nn = grid.node_count();
  std::vector<std::complex<double>> out(nn);
  std::vector<int> dims(grid.dim(), grid.points_per_axis());
  fft_c2c(dims, spectrum.data(), out.data(), FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(nn);
  for (std::int64_t i = 0; i < nn; ++i) values[i] = out[i].real() * scale;
}

/// Wavenumber vectors for every flat node index, laid out as nn x dim.
/// Cached per call site via value semantics; cheap to rebuild.
inline std::vector<double> wavenumber_table(const SpaceGrid& grid) {
  const std::int64_t nn = grid.node_count();
  const int d = grid.dim();
  std::vector<double> xi(static_cast<std::size_t>(nn) * d);
  for (std::int64_t i = 0; i < nn; ++i) {
    auto idx = grid.unflatten(i);
    for (int axis = 0; axis < d; ++axis) xi[i * d + axis] = grid.wavenumber(idx[axis]);
  }
  return xi;
}

}  // namespace heatlab
