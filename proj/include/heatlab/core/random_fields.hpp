#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "heatlab/core/field.hpp"

namespace heatlab {

/// Random periodic trigonometric polynomial with decaying coefficients.
/// Smooth, bounded, deterministic for a fixed seed; the workhorse behind
/// randomized property checks and probe data.
struct TrigPolynomial {
  struct Mode {
    std::array<int, 3> m;   // integer mode per axis
    double amplitude;
    double phase;
  };
  int dim = 1;
  double half_width = M_PI;
  std::vector<Mode> modes;

  double operator()(const double* x) const {
    double acc = 0.0;
    for (const auto& mode : modes) {
      double arg = mode.phase;
      for (int axis = 0; axis < dim; ++axis)
        arg += M_PI * mode.m[axis] / half_width * x[axis];
      acc += mode.amplitude * std::cos(arg);
    }
    return acc;
  }

  double gradient(const double* x, int axis) const {
    double acc = 0.0;
    for (const auto& mode : modes) {
      double arg = mode.phase;
      for (int a = 0; a < dim; ++a) arg += M_PI * mode.m[a] / half_width * x[a];
      acc -= mode.amplitude * (M_PI * mode.m[axis] / half_width) * std::sin(arg);
    }
    return acc;
  }
};

inline TrigPolynomial random_trig_polynomial(std::mt19937_64& rng, int dim, double half_width,
                                             int max_mode, double amplitude) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> mdist(-max_mode, max_mode);
  TrigPolynomial poly;
  poly.dim = dim;
  poly.half_width = half_width;
  const int terms = 2 + static_cast<int>(unif(rng) * 5);
  for (int t = 0; t < terms; ++t) {
    TrigPolynomial::Mode mode;
    mode.m = {0, 0, 0};
    double msq = 0.0;
    for (int axis = 0; axis < dim; ++axis) {
      mode.m[axis] = mdist(rng);
      msq += mode.m[axis] * mode.m[axis];
    }
    mode.amplitude = amplitude * (2.0 * unif(rng) - 1.0) / (1.0 + msq);
    mode.phase = 2.0 * M_PI * unif(rng);
    poly.modes.push_back(mode);
  }
  return poly;
}

inline void fill_slice(FieldSlice& s, int component, const TrigPolynomial& poly) {
  const SpaceGrid& g = s.grid();
  for (std::int64_t i = 0; i < g.node_count(); ++i) {
    auto x = g.position(i);
    s.at(component, i) = poly(x.data());
  }
}

/// Sample a time-modulated trig polynomial: value * (1 + 0.5 sin(omega t)).
inline void fill_field(Field& f, int component, const TrigPolynomial& poly, double omega = 0.0) {
  const SpaceGrid& g = f.grid();
  for (int it = 0; it < f.time_count(); ++it) {
    const double factor = 1.0 + (omega != 0.0 ? 0.5 * std::sin(omega * f.time(it)) : 0.0);
    for (std::int64_t i = 0; i < g.node_count(); ++i) {
      auto x = g.position(i);
      f.at(it, component, i) = factor * poly(x.data());
    }
  }
}

inline FieldSlice random_slice(std::mt19937_64& rng, const SpaceGrid& grid, int components,
                               int max_mode = 4, double amplitude = 1.0) {
  FieldSlice s(grid, components);
  for (int c = 0; c < components; ++c) {
    auto poly = random_trig_polynomial(rng, grid.dim(), grid.half_width(), max_mode, amplitude);
    fill_slice(s, c, poly);
  }
  return s;
}

inline Field random_field(std::mt19937_64& rng, const SpaceGrid& grid, int components,
                          const std::vector<double>& times, int max_mode = 4,
                          double amplitude = 1.0, double omega = 0.0) {
  Field f(grid, components, times);
  for (int c = 0; c < components; ++c) {
    auto poly = random_trig_polynomial(rng, grid.dim(), grid.half_width(), max_mode, amplitude);
    fill_field(f, c, poly, omega);
  }
  return f;
}

}  // namespace heatlab
