#pragma once

#include <complex>
#include <random>
#include <vector>

#include "heatlab/core/fft.hpp"
#include "heatlab/core/norms.hpp"
#include "heatlab/core/random_fields.hpp"

namespace heatlab {

/// Leray-Hopf projection in Fourier space: v^ -> v^ - xi <xi, v^> / |xi|^2.
/// The xi = 0 mode is left untouched (constants are divergence free). Input
/// must be a 3-component field on a 3-D grid.
inline FieldSlice leray_project(const FieldSlice& v) {
  const SpaceGrid& grid = v.grid();
  if (grid.dim() != 3 || v.components() != 3)
    throw std::invalid_argument("leray_project: needs d = r = 3");
  const std::int64_t nn = grid.node_count();
  std::vector<std::vector<std::complex<double>>> spec(3);
  for (int c = 0; c < 3; ++c) spec[c] = fft_forward(grid, v.component(c).data());

  const std::vector<double> xi = wavenumber_table(grid);
  for (std::int64_t i = 0; i < nn; ++i) {
    const double* k = &xi[i * 3];
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) continue;
    const std::complex<double> dot = k[0] * spec[0][i] + k[1] * spec[1][i] + k[2] * spec[2][i];
    for (int c = 0; c < 3; ++c) spec[c][i] -= k[c] * dot / k2;
  }

  FieldSlice out(grid, 3);
  for (int c = 0; c < 3; ++c) fft_inverse_real(grid, spec[c], out.component(c).data());
  return out;
}

inline FieldSlice leray_project(const Field& v, int time_index) {
  return leray_project(v.slice(time_index));
}

inline Field leray_project_all(const Field& v) {
  Field out(v.grid(), v.components(), v.times());
  for (int it = 0; it < v.time_count(); ++it) out.set_slice(it, leray_project(v.slice(it)));
  return out;
}

/// Spectral divergence of a 3-component field (Nyquist rows excluded, as in
/// the gradient).
inline std::vector<double> spectral_divergence(const FieldSlice& v) {
  const SpaceGrid& grid = v.grid();
  if (grid.dim() != 3 || v.components() != 3)
    throw std::invalid_argument("spectral_divergence: needs d = r = 3");
  const std::int64_t nn = grid.node_count();
  std::vector<double> div(nn, 0.0);
  std::vector<double> work(nn);
  for (int c = 0; c < 3; ++c) {
    auto spectrum = fft_forward(grid, v.component(c).data());
    spectral_detail::spectral_axis_derivative(grid, spectrum, c, work.data());
    for (std::int64_t i = 0; i < nn; ++i) div[i] += work[i];
  }
  return div;
}

struct CzProbeResult {
  double p = 0.0;
  int samples = 0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
};

/// Empirical Calderon-Zygmund calibration: max over random trigonometric
/// polynomial fields of ||P phi||_p / ||phi||_p. The lemma's constant reads
/// C_p (d+1); the probe reports the measured product.
inline CzProbeResult cz_probe(double p, int n_samples, std::uint64_t seed = 2024,
                              int points_per_axis = 16) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("cz_probe: p must lie in (1, infinity)");
  if (n_samples < 1) throw std::invalid_argument("cz_probe: n_samples must be >= 1");
  SpaceGrid grid(3, points_per_axis, M_PI);
  std::mt19937_64 rng(seed);
  CzProbeResult result;
  result.p = p;
  result.samples = n_samples;
  double sum = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    FieldSlice phi = random_slice(rng, grid, 3, 3, 1.0);
    const double denom = lp_norm(phi.view(), p);
    if (!(denom > 0.0)) continue;
    const double ratio = lp_norm(leray_project(phi).view(), p) / denom;
    result.max_ratio = std::max(result.max_ratio, ratio);
    sum += ratio;
  }
  result.mean_ratio = sum / n_samples;
  return result;
}

}  // namespace heatlab
