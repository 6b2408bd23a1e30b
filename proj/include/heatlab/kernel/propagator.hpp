#pragma once

#include <complex>
#include <vector>

#include "heatlab/core/fft.hpp"
#include "heatlab/core/field.hpp"
#include "heatlab/kernel/diffusion.hpp"

namespace heatlab {

/// Apply the Fourier multiplier exp(-<A xi, xi>) to every component. This is
/// the exact heat propagator with accumulated diffusion A, i.e. periodized
/// convolution with the proxy Gaussian kernel. The xi = 0 mode is untouched,
/// so constants and the spatial mean are preserved exactly.
inline FieldSlice propagate(const FieldSlice& g, const SmallMatrix& A) {
  const SpaceGrid& grid = g.grid();
  const std::int64_t nn = grid.node_count();
  const int d = grid.dim();
  std::vector<double> mult(nn);
  const std::vector<double> xi = wavenumber_table(grid);
  for (std::int64_t i = 0; i < nn; ++i)
    mult[i] = std::exp(-A.quadratic_form(&xi[i * d]));
  FieldSlice out(grid, g.components());
  for (int c = 0; c < g.components(); ++c) {
    auto spectrum = fft_forward(grid, g.component(c).data());
    for (std::int64_t i = 0; i < nn; ++i) spectrum[i] *= mult[i];
    fft_inverse_real(grid, spectrum, out.component(c).data());
  }
  return out;
}

/// Semigroup P~ g at time t (from t0): identity when t <= t0.
inline FieldSlice semigroup_apply(const FieldSlice& g, const DiffusionSchedule& schedule,
                                  double t, double t0 = 0.0, int quad_steps = 16) {
  if (!(t > t0)) return g;
  const AccumulatedDiffusion acc = accumulate_diffusion(schedule, t0, t, quad_steps);
  return propagate(g, acc.A);
}

namespace green_detail {

/// Quadrature nodes and trapezoid weights on [0, tau]: uniform panels over
/// [0, tau - w] followed by geometrically shrinking panels toward tau. The
/// refinement absorbs the integrable endpoint singularity that spatial
/// derivatives of the Green operator develop at s -> tau.
inline void build_nodes(double tau, int uniform_panels, std::vector<double>& nodes,
                        std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  if (!(tau > 0.0)) return;
  const int K = std::max(1, uniform_panels);
  const double w = tau / K;
  constexpr int kGeomLevels = 48;

  std::vector<double> pts;
  for (int i = 0; i < K; ++i) pts.push_back(i * w);  // 0 .. tau - w
  for (int m = 1; m <= kGeomLevels; ++m) pts.push_back(tau - w * std::ldexp(1.0, -m));
  pts.push_back(tau);

  nodes = pts;
  weights.assign(pts.size(), 0.0);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double hp = pts[i + 1] - pts[i];
    weights[i] += 0.5 * hp;
    weights[i + 1] += 0.5 * hp;
  }
}

}  // namespace green_detail

/// Proxy Green operator G~ f evaluated at every sampled instant up to t:
///   G~ f(tau, x) = int_0^tau  P~_{s -> tau} f(s, .) ds.
/// Time quadrature is trapezoidal with geometric refinement near the moving
/// endpoint; f is interpolated linearly between its stored slices. Returns a
/// field sampled at f's instants <= t (t itself is appended when it falls
/// between samples).
inline Field green_apply(const Field& f, const DiffusionSchedule& schedule, double t,
                         int time_quad = 64) {
  const double tol = 1e-10;
  if (t < -tol || t > f.times().back() + tol)
    throw std::invalid_argument("green_apply: t outside sampled range");

  std::vector<double> out_times;
  for (double s : f.times())
    if (s <= t + tol) out_times.push_back(s);
  if (out_times.empty() || (t - out_times.back()) > tol) out_times.push_back(t);

  const SpaceGrid& grid = f.grid();
  const std::int64_t nn = grid.node_count();
  const int d = grid.dim();
  const int r = f.components();
  Field out(grid, r, out_times);

  // Spectra of every stored slice we may interpolate between.
  int max_needed = 0;
  while (max_needed + 1 < f.time_count() && f.time(max_needed) < t - tol) ++max_needed;
  std::vector<std::vector<std::complex<double>>> spectra(
      static_cast<std::size_t>(max_needed + 1) * r);
  for (int it = 0; it <= max_needed; ++it)
    for (int c = 0; c < r; ++c)
      spectra[static_cast<std::size_t>(it) * r + c] = fft_forward(grid, f.component(it, c).data());

  const std::vector<double> xi = wavenumber_table(grid);
  std::vector<double> nodes, weights;
  std::vector<std::complex<double>> acc(nn);

  for (std::size_t jt = 1; jt < out_times.size(); ++jt) {
    const double tau = out_times[jt];
    green_detail::build_nodes(tau, time_quad, nodes, weights);

    // Cumulative A(0, s) along the ascending node list.
    std::vector<SmallMatrix> a0(nodes.size());
    SmallMatrix cum = SmallMatrix::zero(schedule.d);
    double prev = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k] > prev + 1e-300) {
        cum += accumulate_diffusion(schedule, prev, nodes[k], 4).A;
        prev = nodes[k];
      }
      a0[k] = cum;
    }
    const SmallMatrix a0_tau = a0.back();

    for (int c = 0; c < r; ++c) {
      std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (weights[k] == 0.0) continue;
        const double s = nodes[k];
        // Linear interpolation of the spectrum between stored slices.
        int hi = 0;
        while (hi < max_needed && f.time(hi) < s - tol) ++hi;
        int lo = hi;
        double wgt = 0.0;
        if (f.time(hi) > s + tol && hi > 0) {
          lo = hi - 1;
          wgt = (s - f.time(lo)) / (f.time(hi) - f.time(lo));
        }
        const auto& spec_lo = spectra[static_cast<std::size_t>(lo) * r + c];
        const auto& spec_hi = spectra[static_cast<std::size_t>(hi) * r + c];
        const SmallMatrix B = a0_tau - a0[k];
        for (std::int64_t i = 0; i < nn; ++i) {
          const double mult = std::exp(-B.quadratic_form(&xi[i * d]));
          const std::complex<double> fs =
              (1.0 - wgt) * spec_lo[i] + wgt * spec_hi[i];
          acc[i] += weights[k] * mult * fs;
        }
      }
      fft_inverse_real(grid, acc, out.component(static_cast<int>(jt), c).data());
    }
  }
  return out;
}

}  // namespace heatlab
