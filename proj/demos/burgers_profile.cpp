// Solve the viscous Burgers benchmark with the Picard fixed point and dump
// the final profile next to the Cole-Hopf reference.

#include <cstdio>

#include "heatlab/heatlab.hpp"

int main() {
  using namespace heatlab;

  const int n = 128;
  const double nu = 0.1, horizon = 1.0;
  SpaceGrid grid(1, n, M_PI);
  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    g.at(0, i) = -std::sin(grid.coord(static_cast<int>(i)));

  CoefficientSet coeffs{DiffusionSchedule::isotropic(1, nu), std::nullopt, std::nullopt,
                        std::nullopt, g};
  FixedPointOptions opts;
  opts.tol = 1e-10;
  opts.max_iter = 200;
  const auto solved = quasilinear_solve(DriftOperator::identity(), ZeroOrderOperator::zero(),
                                        coeffs, uniform_times(horizon, n), opts);

  std::printf("converged after %d iterations, last residual %.3e\n", solved.trace.iterations,
              solved.trace.records.back().residual);
  const auto phi0 = burgers_minus_sine_phi0(nu);
  const int last = solved.u.time_count() - 1;
  std::printf("%12s %14s %14s\n", "x", "u", "cole-hopf");
  for (int i = 0; i < n; i += 8) {
    const double x = grid.coord(i);
    std::printf("%12.6f %14.8f %14.8f\n", x, solved.u.at(last, 0, i),
                burgers_cole_hopf_reference(x, horizon, nu, phi0, M_PI));
  }
  return 0;
}
