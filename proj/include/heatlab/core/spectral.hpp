#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "heatlab/core/fft.hpp"
#include "heatlab/core/field.hpp"

namespace heatlab {

enum class DerivativeMode { Spectral, FD4 };

namespace spectral_detail {

// Differentiate one scalar component along `axis` via the i*xi multiplier.
// The Nyquist bin gets a zero multiplier so the result stays real-symmetric.
inline void spectral_axis_derivative(const SpaceGrid& g,
                                     const std::vector<std::complex<double>>& spectrum,
                                     int axis, double* out) {
  const std::int64_t nn = g.node_count();
  const int n = g.points_per_axis();
  std::vector<std::complex<double>> work(nn);
  for (std::int64_t i = 0; i < nn; ++i) {
    auto idx = g.unflatten(i);
    const int k = idx[axis];
    double xi = (k == n / 2) ? 0.0 : g.wavenumber(k);
    work[i] = spectrum[i] * std::complex<double>(0.0, xi);
  }
  fft_inverse_real(g, work, out);
}

inline void spectral_axis2_derivative(const SpaceGrid& g,
                                      const std::vector<std::complex<double>>& spectrum,
                                      int axis_a, int axis_b, double* out) {
  const std::int64_t nn = g.node_count();
  std::vector<std::complex<double>> work(nn);
  for (std::int64_t i = 0; i < nn; ++i) {
    auto idx = g.unflatten(i);
    const double xa = g.wavenumber(idx[axis_a]);
    const double xb = g.wavenumber(idx[axis_b]);
    work[i] = spectrum[i] * (-xa * xb);
  }
  fft_inverse_real(g, work, out);
}

// Classic 4th-order centered stencil with periodic wrap.
inline void fd4_axis_derivative(const SpaceGrid& g, std::span<const double> comp,
                                int axis, double* out) {
  const std::int64_t nn = g.node_count();
  const int n = g.points_per_axis();
  const double inv12h = 1.0 / (12.0 * g.spacing());
  for (std::int64_t i = 0; i < nn; ++i) {
    auto idx = g.unflatten(i);
    auto shifted = [&](int offset) {
      auto j = idx;
      j[axis] = ((idx[axis] + offset) % n + n) % n;
      return comp[g.flatten(j)];
    };
    out[i] = (-shifted(2) + 8.0 * shifted(1) - 8.0 * shifted(-1) + shifted(-2)) * inv12h;
  }
}

}  // namespace spectral_detail

/// Gradient of every component: result has r*d components ordered
/// (component, axis). Spectral differentiation by default; 4th-order
/// centered differences as the cross-check mode.
inline FieldSlice fd_gradient(const SliceView& u, DerivativeMode mode = DerivativeMode::Spectral) {
  const SpaceGrid& g = *u.grid;
  if (g.points_per_axis() < 8)
    throw std::invalid_argument("fd_gradient: needs n >= 8 per axis");
  const int d = g.dim();
  FieldSlice out(g, u.components * d);
  for (int c = 0; c < u.components; ++c) {
    if (mode == DerivativeMode::Spectral) {
      auto spectrum = fft_forward(g, u.component(c).data());
      for (int axis = 0; axis < d; ++axis)
        spectral_detail::spectral_axis_derivative(g, spectrum, axis,
                                                  out.component(c * d + axis).data());
    } else {
      for (int axis = 0; axis < d; ++axis)
        spectral_detail::fd4_axis_derivative(g, u.component(c), axis,
                                             out.component(c * d + axis).data());
    }
  }
  return out;
}

inline FieldSlice fd_gradient(const Field& f, int time_index,
                              DerivativeMode mode = DerivativeMode::Spectral) {
  return fd_gradient(f.view(time_index), mode);
}

/// Hessian of every component: result has r*d*d components ordered
/// (component, axis_a, axis_b).
inline FieldSlice fd_hessian(const SliceView& u, DerivativeMode mode = DerivativeMode::Spectral) {
  const SpaceGrid& g = *u.grid;
  const int d = g.dim();
  FieldSlice out(g, u.components * d * d);
  for (int c = 0; c < u.components; ++c) {
    if (mode == DerivativeMode::Spectral) {
      auto spectrum = fft_forward(g, u.component(c).data());
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
          spectral_detail::spectral_axis2_derivative(g, spectrum, a, b,
                                                     out.component((c * d + a) * d + b).data());
          if (b != a) {
            auto src = out.component((c * d + a) * d + b);
            auto dst = out.component((c * d + b) * d + a);
            std::copy(src.begin(), src.end(), dst.begin());
          }
        }
    } else {
      // FD4 Hessian: differentiate the FD4 gradient once more.
      FieldSlice grad = fd_gradient(u, DerivativeMode::FD4);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          spectral_detail::fd4_axis_derivative(g, grad.component(c * d + a), b,
                                               out.component((c * d + a) * d + b).data());
    }
  }
  return out;
}

inline FieldSlice fd_hessian(const Field& f, int time_index,
                             DerivativeMode mode = DerivativeMode::Spectral) {
  return fd_hessian(f.view(time_index), mode);
}

}  // namespace heatlab
