#pragma once

// Test-only oracles, independent of the library paths they check.

#include <cmath>
#include <functional>
#include <vector>

#include "heatlab/core/field.hpp"
#include "heatlab/core/norms.hpp"

namespace heatlab::testing {

/// Brute-force Hoelder seminorm over every node pair.
inline double brute_force_holder(const SliceView& u, double gamma, PairMetric metric) {
  const SpaceGrid& g = *u.grid;
  const std::int64_t nn = g.node_count();
  double best = 0.0;
  for (std::int64_t a = 0; a < nn; ++a)
    for (std::int64_t b = a + 1; b < nn; ++b) {
      const double dist =
          metric == PairMetric::Torus ? g.torus_distance(a, b) : g.box_distance(a, b);
      if (!(dist > 0.0)) continue;
      double diff2 = 0.0;
      for (int c = 0; c < u.components; ++c) {
        const double dv = u.component(c)[a] - u.component(c)[b];
        diff2 += dv * dv;
      }
      best = std::max(best, std::sqrt(diff2) / std::pow(dist, gamma));
    }
  return best;
}

/// Largest root of x = a x^eta + b by bisection (the fixed-point map is
/// increasing and concave for x > 0, so the root is unique).
inline double largest_root_of_circular_equation(double a, double b, double eta) {
  auto f = [&](double x) { return a * std::pow(x, eta) + b - x; };
  double hi = std::max(1.0, 2.0 * (a + b));
  while (f(hi) > 0.0) hi *= 2.0;
  double lo = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

/// Dense 1-D scan of sup_x (1 + |x|^beta) |psi(x)| on [-L, L].
inline double dense_beta_scan(const std::function<double(double)>& psi, double beta, double L,
                              int points = 200000) {
  double best = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double x = -L + 2.0 * L * i / points;
    best = std::max(best, (1.0 + std::pow(std::fabs(x), beta)) * std::fabs(psi(x)));
  }
  return best;
}

/// Max-norm distance between two fields sampled on the same layout.
inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  auto ra = a.raw();
  auto rb = b.raw();
  for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::fabs(ra[i] - rb[i]));
  return m;
}

}  // namespace heatlab::testing
