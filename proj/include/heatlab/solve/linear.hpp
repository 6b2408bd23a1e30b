#pragma once

#include <vector>

#include "heatlab/core/spectral.hpp"
#include "heatlab/kernel/propagator.hpp"
#include "heatlab/solve/coefficients.hpp"

namespace heatlab {

namespace linear_detail {

/// N(t, U) = f(t) - b(t) . DU - c(t) (x) U, the non-stiff part of the system.
inline FieldSlice interaction_terms(const CoefficientSet& coeffs, int it, const FieldSlice& u) {
  const SpaceGrid& grid = u.grid();
  const int r = u.components();
  const int d = grid.dim();
  const std::int64_t nn = grid.node_count();
  FieldSlice out(grid, r);

  if (coeffs.f) {
    for (int c = 0; c < r; ++c) {
      auto src = coeffs.f->component(it, c);
      std::copy(src.begin(), src.end(), out.component(c).begin());
    }
  }
  if (coeffs.b) {
    const FieldSlice grad = fd_gradient(u.view());
    for (int i = 0; i < r; ++i) {
      auto acc = out.component(i);
      for (int axis = 0; axis < d; ++axis) {
        auto bcomp = coeffs.b->values.component(it, coeffs.b->component_index(i, axis, d));
        auto gcomp = grad.component(i * d + axis);
        for (std::int64_t k = 0; k < nn; ++k) acc[k] -= bcomp[k] * gcomp[k];
      }
    }
  }
  if (coeffs.c) {
    for (int i = 0; i < r; ++i) {
      auto acc = out.component(i);
      for (int j = 0; j < r; ++j) {
        auto ccomp = coeffs.c->component(it, i * r + j);
        auto ucomp = u.component(j);
        for (std::int64_t k = 0; k < nn; ++k) acc[k] -= ccomp[k] * ucomp[k];
      }
    }
  }
  return out;
}

inline void axpy(FieldSlice& y, double alpha, const FieldSlice& x) {
  auto ydata = y.raw();
  auto xdata = x.raw();
  for (std::size_t k = 0; k < ydata.size(); ++k) ydata[k] += alpha * xdata[k];
}

}  // namespace linear_detail

/// Integrating-factor scheme for the linear system: exact heat propagation
/// in Fourier space per step, drift / zero-order / source handled by Heun
/// (second order) in the interaction picture. With b = c = f = 0 the march
/// reduces to the exact discrete semigroup.
inline Field solve_linear(const CoefficientSet& coeffs, const std::vector<double>& times,
                          bool verify_ellipticity = true) {
  coeffs.validate_against(times);
  if (verify_ellipticity) coeffs.a.verify_ellipticity(times.back());

  const SpaceGrid& grid = coeffs.g.grid();
  const int r = coeffs.components();
  Field u(grid, r, times);
  u.set_slice(0, coeffs.g);

  FieldSlice current = coeffs.g;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double dt = times[k + 1] - times[k];
    const SmallMatrix a_step = accumulate_diffusion(coeffs.a, times[k], times[k + 1], 4).A;

    const FieldSlice k1 = linear_detail::interaction_terms(coeffs, static_cast<int>(k), current);

    // Predictor: Euler then propagate.
    FieldSlice stage = current;
    linear_detail::axpy(stage, dt, k1);
    const FieldSlice predictor = propagate(stage, a_step);

    const FieldSlice k2 =
        linear_detail::interaction_terms(coeffs, static_cast<int>(k + 1), predictor);

    FieldSlice half = current;
    linear_detail::axpy(half, 0.5 * dt, k1);
    FieldSlice next = propagate(half, a_step);
    linear_detail::axpy(next, 0.5 * dt, k2);

    u.set_slice(static_cast<int>(k + 1), next);
    current = std::move(next);
  }
  return u;
}

}  // namespace heatlab
