#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "heatlab/core/field.hpp"
#include "heatlab/core/norms.hpp"
#include "heatlab/kernel/diffusion.hpp"
#include "heatlab/mc/counter_rng.hpp"

namespace heatlab {

/// Per-component drift callback: fills out[0..d) with b_i(t, x).
using DriftFn = std::function<void(double t, const double* x, int component, double* out)>;

/// Time-reversed SDE behind the probabilistic representation
///   d X^i_s = -b_i(T - s, X^i_s) ds + sigma(T - s) dB^i_s,
/// one independent Brownian block per solution component, with
/// sigma sigma^T = 2 a (the sqrt(2) of the driving noise is absorbed into
/// the Cholesky factor).
struct SdeSpec {
  int d = 1;
  int r = 1;
  DriftFn drift;  // null means zero drift
  DiffusionSchedule diffusion;
  double horizon = 1.0;
};

/// Simulated trajectories; reproducible bit-for-bit from
/// (seed, n_paths, n_steps, spec).
struct PathEnsemble {
  int d = 1;
  int r = 1;
  int n_steps = 0;
  std::int64_t n_paths = 0;
  std::uint64_t seed = 0;
  double t_start = 0.0;
  double horizon = 0.0;
  std::vector<double> times;      // path times s_0 .. s_{n_steps}
  std::vector<double> positions;  // (path, step, component, axis)

  const double* position(std::int64_t path, int step, int component) const {
    const std::size_t idx =
        ((static_cast<std::size_t>(path) * (n_steps + 1) + step) * r + component) * d;
    return &positions[idx];
  }
  double* position(std::int64_t path, int step, int component) {
    const std::size_t idx =
        ((static_cast<std::size_t>(path) * (n_steps + 1) + step) * r + component) * d;
    return &positions[idx];
  }

  /// PDE duration the ensemble represents: the estimate targets u(duration, x).
  double duration() const { return horizon - t_start; }
};

/// Euler-Maruyama over [t_start, horizon]. The diffusion term is exact
/// between drift evaluations since sigma does not depend on x.
inline PathEnsemble simulate_paths(const SdeSpec& spec, const double* x0, double t_start,
                                   std::int64_t n_paths, int n_steps, std::uint64_t seed) {
  if (n_steps < 1) throw std::invalid_argument("simulate_paths: n_steps must be >= 1");
  if (n_paths < 1) throw std::invalid_argument("simulate_paths: n_paths must be >= 1");
  if (!(spec.horizon > t_start)) throw std::invalid_argument("simulate_paths: horizon <= t_start");

  PathEnsemble ens;
  ens.d = spec.d;
  ens.r = spec.r;
  ens.n_steps = n_steps;
  ens.n_paths = n_paths;
  ens.seed = seed;
  ens.t_start = t_start;
  ens.horizon = spec.horizon;
  const double ds = (spec.horizon - t_start) / n_steps;
  ens.times.resize(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) ens.times[k] = t_start + k * ds;
  ens.positions.resize(static_cast<std::size_t>(n_paths) * (n_steps + 1) * spec.r * spec.d);

  const double sqrt_ds = std::sqrt(ds);
  CounterRng rng(seed);
  std::vector<SmallMatrix> sigma(n_steps);
  for (int k = 0; k < n_steps; ++k)
    sigma[k] = cholesky_of_diffusion(spec.diffusion, spec.horizon - ens.times[k]);

  double bvec[3];
  double z[4];
  for (std::int64_t p = 0; p < n_paths; ++p) {
    for (int i = 0; i < spec.r; ++i) {
      double* x = ens.position(p, 0, i);
      for (int axis = 0; axis < spec.d; ++axis) x[axis] = x0[axis];
    }
    for (int k = 0; k < n_steps; ++k) {
      const double s = ens.times[k];
      const double pde_t = spec.horizon - s;
      for (int i = 0; i < spec.r; ++i) {
        const double* xk = ens.position(p, k, i);
        double* xn = ens.position(p, k + 1, i);
        if (spec.drift)
          spec.drift(pde_t, xk, i, bvec);
        else
          for (int axis = 0; axis < spec.d; ++axis) bvec[axis] = 0.0;
        // One Brownian block per component; slots keyed by (component, axis pair).
        for (int pair = 0; pair < (spec.d + 1) / 2; ++pair)
          rng.normal_pair(p, k, static_cast<std::uint64_t>(i) * 4 + pair, z[2 * pair],
                          z[2 * pair + 1]);
        for (int axis = 0; axis < spec.d; ++axis) {
          double noise = 0.0;
          for (int col = 0; col <= axis; ++col) noise += sigma[k](axis, col) * z[col];
          xn[axis] = xk[axis] - bvec[axis] * ds + sqrt_ds * noise;
        }
      }
    }
  }
  return ens;
}

struct FkEstimate {
  std::vector<double> value;      // per component
  std::vector<double> std_error;  // per component
};

/// Monte-Carlo estimator of u(duration, x0) for the artifact-form system
///   du/dt + b . Du + c (x) u = D^2 u : a + f,   u(0) = g,
/// restricted to c = 0:
///   u_i = E[ g_i(X^i_T) ] + E[ int_0^duration f_i(tau, X^i_{T - tau}) dtau ].
/// A non-null zero-order coupling is rejected: the representation would
/// contain u itself inside the expectation.
inline FkEstimate fk_estimate(const PathEnsemble& ens, const FieldSlice& g, const Field* f,
                              const Field* c = nullptr) {
  if (c != nullptr)
    throw std::invalid_argument(
        "fk_estimate: zero-order coupling c != 0 is unsupported; use the deterministic solver");
  if (g.components() != ens.r) throw std::invalid_argument("fk_estimate: g component mismatch");
  if (f && f->components() != ens.r)
    throw std::invalid_argument("fk_estimate: f component mismatch");

  FkEstimate est;
  est.value.assign(ens.r, 0.0);
  est.std_error.assign(ens.r, 0.0);
  const int n_steps = ens.n_steps;
  const double ds = (ens.horizon - ens.t_start) / n_steps;

  for (int i = 0; i < ens.r; ++i) {
    CompensatedSum sum, sumsq;
    for (std::int64_t p = 0; p < ens.n_paths; ++p) {
      double contrib = interpolate(g.view(), i, ens.position(p, n_steps, i));
      if (f) {
        CompensatedSum path_integral;
        for (int k = 0; k <= n_steps; ++k) {
          const double weight = (k == 0 || k == n_steps) ? 0.5 * ds : ds;
          const double pde_t = ens.horizon - ens.times[k];
          path_integral.add(weight * interpolate(*f, i, pde_t, ens.position(p, k, i)));
        }
        contrib += path_integral.value();
      }
      sum.add(contrib);
      sumsq.add(contrib * contrib);
    }
    const double n = static_cast<double>(ens.n_paths);
    const double mean = sum.value() / n;
    est.value[i] = mean;
    if (ens.n_paths > 1) {
      const double var = std::max(0.0, (sumsq.value() - n * mean * mean) / (n - 1.0));
      est.std_error[i] = std::sqrt(var / n);
    }
  }
  return est;
}

/// Drift backed by a sampled field with r*d components (per-component
/// stacked d-vectors); evaluation interpolates off-grid.
inline DriftFn drift_from_field(Field b) {
  auto shared = std::make_shared<Field>(std::move(b));
  const int d = shared->grid().dim();
  return [shared, d](double t, const double* x, int component, double* out) {
    for (int axis = 0; axis < d; ++axis)
      out[axis] = interpolate(*shared, component * d + axis, t, x);
  };
}

}  // namespace heatlab
