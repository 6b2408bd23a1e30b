#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace heatlab {

/// Circular-argument closure: whenever x <= a x^eta + b with a, b >= 0 and
/// eta in (0,1), then x <= 2 b + 2^{1/(1-eta)} a^{1/(1-eta)}.
inline double taupe_bound(double a, double b, double eta) {
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("taupe_bound: a, b must be >= 0");
  if (!(eta > 0.0) || !(eta < 1.0)) throw std::invalid_argument("taupe_bound: eta in (0,1)");
  const double inv = 1.0 / (1.0 - eta);
  return 2.0 * b + std::pow(2.0, inv) * std::pow(a, inv);
}

/// Gronwall closure base * exp(int rate) with the rate integrated by
/// trapezoid over its samples on [0, t].
inline double gronwall_bound(double base, const std::vector<double>& rate_times,
                             const std::vector<double>& rate_values) {
  if (base < 0.0) throw std::invalid_argument("gronwall_bound: base must be >= 0");
  if (rate_times.size() != rate_values.size() || rate_times.size() < 2)
    throw std::invalid_argument("gronwall_bound: need matching sample arrays of size >= 2");
  for (double v : rate_values)
    if (v < 0.0) throw std::invalid_argument("gronwall_bound: rate samples must be >= 0");
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < rate_times.size(); ++i) {
    const double dt = rate_times[i + 1] - rate_times[i];
    if (!(dt > 0.0)) throw std::invalid_argument("gronwall_bound: times must increase");
    integral += 0.5 * dt * (rate_values[i] + rate_values[i + 1]);
  }
  return base * std::exp(integral);
}

/// Convenience overload for a constant rate on [0, t].
inline double gronwall_bound(double base, double rate, double t) {
  if (base < 0.0) throw std::invalid_argument("gronwall_bound: base must be >= 0");
  if (rate < 0.0) throw std::invalid_argument("gronwall_bound: rate must be >= 0");
  if (!(t >= 0.0)) throw std::invalid_argument("gronwall_bound: t must be >= 0");
  return base * std::exp(rate * t);
}

}  // namespace heatlab
