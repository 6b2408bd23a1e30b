#pragma once

#include <cmath>
#include <functional>

namespace heatlab {

// Closed-form reference solutions evaluated by direct quadrature against the
// periodized heat kernel. Deliberately free of FFTs and of the solver path:
// these back the error tables of the benchmark experiments.

namespace reference_detail {

/// int_{-L}^{L} K(x - y) w(y) dy by the periodic trapezoid rule, summing
/// kernel images over m in [-images, images].
template <typename Kernel, typename Weight>
double periodized_quadrature(Kernel kernel, Weight weight, double x, double L, int quad_points,
                             int images) {
  const double h = 2.0 * L / quad_points;
  double acc = 0.0;
  for (int j = 0; j < quad_points; ++j) {
    const double y = -L + j * h;
    double k = 0.0;
    for (int m = -images; m <= images; ++m) k += kernel(x - y + 2.0 * L * m);
    acc += k * weight(y);
  }
  return acc * h;
}

}  // namespace reference_detail

/// Viscous Burgers u_t + u u_x = nu u_xx on [-L, L) periodic:
/// u = -2 nu (d/dx) log phi with phi the heat evolution of
/// phi0(y) = exp(-(1/(2 nu)) int_0^y g).
inline double burgers_cole_hopf_reference(double x, double t, double nu,
                                          const std::function<double(double)>& phi0, double L,
                                          int quad_points = 4096, int images = 3) {
  if (!(t > 0.0)) throw std::invalid_argument("burgers reference: t must be positive");
  const double var = 4.0 * nu * t;
  auto kernel = [&](double z) { return std::exp(-z * z / var) / std::sqrt(M_PI * var); };
  auto kernel_dx = [&](double z) { return -2.0 * z / var * std::exp(-z * z / var) / std::sqrt(M_PI * var); };
  const double phi = reference_detail::periodized_quadrature(kernel, phi0, x, L, quad_points, images);
  const double phi_x =
      reference_detail::periodized_quadrature(kernel_dx, phi0, x, L, quad_points, images);
  return -2.0 * nu * phi_x / phi;
}

/// phi0 for the Burgers benchmark datum g = -sin: exp(-(cos y - 1)/(2 nu)).
inline std::function<double(double)> burgers_minus_sine_phi0(double nu) {
  return [nu](double y) { return std::exp(-(std::cos(y) - 1.0) / (2.0 * nu)); };
}

/// KPZ-type equation u_t + |u_x|^2 = nu u_xx on [-L, L) periodic:
/// h = exp(-u / nu) solves the heat equation, so
/// u(t, x) = -nu log( heat evolution of exp(-g/nu) ).
inline double kpz_cole_hopf_reference(double x, double t, double nu,
                                      const std::function<double(double)>& g, double L,
                                      int quad_points = 4096, int images = 3) {
  if (!(t > 0.0)) throw std::invalid_argument("kpz reference: t must be positive");
  const double var = 4.0 * nu * t;
  auto kernel = [&](double z) { return std::exp(-z * z / var) / std::sqrt(M_PI * var); };
  auto h0 = [&](double y) { return std::exp(-g(y) / nu); };
  const double h = reference_detail::periodized_quadrature(kernel, h0, x, L, quad_points, images);
  return -nu * std::log(h);
}

}  // namespace heatlab
