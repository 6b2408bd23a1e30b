#pragma once

#include <cmath>

#include "heatlab/kernel/diffusion.hpp"

namespace heatlab {

/// Gaussian density with covariance structure A:
///   (4 pi)^{-d/2} det(A)^{-1/2} exp(-<A^{-1} z, z> / 4).
/// Throws on singular or non-positive-definite A.
inline double kernel_density(const SmallMatrix& A, const double* z) {
  const double dd = A.det();
  if (!(dd > 0.0)) throw std::invalid_argument("kernel_density: A must be positive definite");
  const SmallMatrix inv = A.inverse();
  const double quad = inv.quadratic_form(z);
  if (quad < 0.0) throw std::invalid_argument("kernel_density: A must be positive definite");
  const double norm = std::pow(4.0 * M_PI, -0.5 * A.d) / std::sqrt(dd);
  return norm * std::exp(-0.25 * quad);
}

inline double kernel_density(const AccumulatedDiffusion& acc, const double* z) {
  return kernel_density(acc.A, z);
}

/// Explicit envelope: (4 pi nu (s-t))^{-d/2} exp(-|z|^2 / (4 a_sup (s-t))).
/// Dominates kernel_density(A_{s,t}, z) pointwise whenever the schedule
/// respects its ellipticity window.
inline double kernel_envelope(int d, double nu, double a_sup, double s_minus_t, const double* z) {
  if (!(s_minus_t > 0.0)) throw std::invalid_argument("kernel_envelope: requires s > t");
  double z2 = 0.0;
  for (int axis = 0; axis < d; ++axis) z2 += z[axis] * z[axis];
  return std::pow(4.0 * M_PI * nu * s_minus_t, -0.5 * d) *
         std::exp(-z2 / (4.0 * a_sup * s_minus_t));
}

}  // namespace heatlab
