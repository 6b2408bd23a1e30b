#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "heatlab/core/norms.hpp"
#include "heatlab/kernel/propagator.hpp"

namespace heatlab {

struct ScalingProbeResult {
  int order = 0;
  double gamma = 0.0;
  std::vector<std::pair<double, double>> samples;  // (T, norm)
  double slope = 0.0;
};

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(const std::vector<std::pair<double, double>>& samples) {
  const std::size_t n = samples.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : samples) {
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Sweep the horizon T and fit the growth exponent of ||D^order G~ zeta||_inf
/// for the rough test profile zeta(x) = |sin x|^gamma (a genuine C^gamma
/// function, sampled on a fine 1-D grid). Expected exponents for small T:
/// 1 (order 0), (1+gamma)/2 (order 1), gamma/2 (order 2).
inline ScalingProbeResult kernel_scaling_probe(int order, double gamma,
                                               const std::vector<double>& t_sweep,
                                               const DiffusionSchedule& schedule,
                                               int points_per_axis = 512, int time_quad = 128) {
  if (order < 0 || order > 2) throw std::invalid_argument("kernel_scaling_probe: order in {0,1,2}");
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("kernel_scaling_probe: gamma in (0,1)");
  if (t_sweep.size() < 4)
    throw std::invalid_argument("kernel_scaling_probe: sweep needs at least 4 horizons");
  if (schedule.d != 1) throw std::invalid_argument("kernel_scaling_probe: 1-D schedules only");

  SpaceGrid grid(1, points_per_axis, M_PI);
  double t_max = 0.0;
  for (double t : t_sweep) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel_scaling_probe: horizons must be positive");
    t_max = std::max(t_max, t);
  }

  Field zeta(grid, 1, std::vector<double>{0.0, t_max});
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    const double v = std::pow(std::fabs(std::sin(grid.coord(static_cast<int>(i)))), gamma);
    zeta.at(0, 0, i) = v;
    zeta.at(1, 0, i) = v;
  }

  ScalingProbeResult result;
  result.order = order;
  result.gamma = gamma;
  for (double t : t_sweep) {
    Field g = green_apply(zeta, schedule, t, time_quad);
    const int jt = g.time_count() - 1;
    double norm = 0.0;
    switch (order) {
      case 0:
        norm = linf_norm(g, jt);
        break;
      case 1:
        norm = linf_norm(fd_gradient(g, jt).view());
        break;
      default:
        norm = linf_norm(fd_hessian(g, jt).view());
        break;
    }
    result.samples.emplace_back(t, norm);
  }
  result.slope = fit_loglog_slope(result.samples);
  return result;
}

/// Geometric sweep helper: count points from t_lo to t_hi inclusive.
inline std::vector<double> geometric_sweep(double t_lo, double t_hi, int count) {
  std::vector<double> sweep(count);
  for (int i = 0; i < count; ++i)
    sweep[i] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (count - 1));
  return sweep;
}

}  // namespace heatlab
