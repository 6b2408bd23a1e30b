#pragma once

#include <functional>
#include <random>
#include <stdexcept>

#include "heatlab/core/small_matrix.hpp"

namespace heatlab {

/// Time-dependent diffusion matrix a(t) with its claimed ellipticity window
/// nu |x|^2 <= <x a(t), x> <= a_sup |x|^2. Space-dependent coefficients are
/// out of scope (they would need a frozen-coefficient proxy around a
/// reference point); this is the natural extension seam.
struct DiffusionSchedule {
  int d = 1;
  std::function<SmallMatrix(double)> a;
  double nu = 1.0;
  double a_sup = 1.0;
  bool time_constant = false;

  static DiffusionSchedule isotropic(int d, double nu_value) {
    DiffusionSchedule s;
    s.d = d;
    s.nu = nu_value;
    s.a_sup = nu_value;
    s.time_constant = true;
    s.a = [d, nu_value](double) { return SmallMatrix::identity(d, nu_value); };
    return s;
  }

  static DiffusionSchedule constant(const SmallMatrix& m, double nu_value, double sup_value) {
    DiffusionSchedule s;
    s.d = m.d;
    s.nu = nu_value;
    s.a_sup = sup_value;
    s.time_constant = true;
    s.a = [m](double) { return m; };
    return s;
  }

  static DiffusionSchedule of(int d, std::function<SmallMatrix(double)> fn, double nu_value,
                              double sup_value) {
    DiffusionSchedule s;
    s.d = d;
    s.nu = nu_value;
    s.a_sup = sup_value;
    s.a = std::move(fn);
    return s;
  }

  /// Spot-check the ellipticity window on random unit probe vectors at
  /// sampled times. Throws when a sample escapes the declared window.
  void verify_ellipticity(double t_max, int probes = 64, std::uint64_t seed = 17) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double tol = 1e-9;
    for (int k = 0; k < probes; ++k) {
      const double t = t_max * (k + 0.5) / probes;
      const SmallMatrix m = a(t);
      if (m.d != d) throw std::invalid_argument("DiffusionSchedule: dimension mismatch");
      double x[3] = {0.0, 0.0, 0.0};
      double norm2 = 0.0;
      for (int axis = 0; axis < d; ++axis) {
        x[axis] = gauss(rng);
        norm2 += x[axis] * x[axis];
      }
      if (norm2 == 0.0) continue;
      const double q = m.quadratic_form(x);
      if (q < nu * norm2 * (1.0 - tol) || q > a_sup * norm2 * (1.0 + tol))
        throw std::runtime_error("DiffusionSchedule: ellipticity window violated on probe vector");
    }
  }
};

/// Accumulated diffusion A_{s,t} = int_t^s a over [t, s], t < s.
struct AccumulatedDiffusion {
  double t = 0.0;
  double s = 0.0;
  SmallMatrix A;
};

/// Entrywise composite Simpson quadrature of int_t^s a; exact for schedules
/// polynomial in time up to degree 3.
inline AccumulatedDiffusion accumulate_diffusion(const DiffusionSchedule& schedule, double t,
                                                 double s, int quad_steps = 16) {
  if (!(s > t)) throw std::invalid_argument("accumulate_diffusion: requires s > t");
  if (t < 0.0) throw std::invalid_argument("accumulate_diffusion: requires t >= 0");
  if (quad_steps < 1) quad_steps = 1;
  SmallMatrix acc = SmallMatrix::zero(schedule.d);
  const double h = (s - t) / quad_steps;
  for (int k = 0; k < quad_steps; ++k) {
    const double lo = t + k * h;
    const SmallMatrix m0 = schedule.a(lo);
    const SmallMatrix m1 = schedule.a(lo + 0.5 * h);
    const SmallMatrix m2 = schedule.a(lo + h);
    acc += (h / 6.0) * (m0 + 4.0 * m1 + m2);
  }
  if (!acc.is_symmetric(1e-9))
    throw std::runtime_error("accumulate_diffusion: accumulated matrix not symmetric");
  return AccumulatedDiffusion{t, s, acc};
}

/// Lower-triangular sigma with sigma sigma^T = 2 a(t); the sqrt(2) of the
/// driving noise is absorbed into the factor.
inline SmallMatrix cholesky_of_diffusion(const DiffusionSchedule& schedule, double t) {
  const SmallMatrix a = schedule.a(t);
  return (2.0 * a).cholesky();
}

}  // namespace heatlab
