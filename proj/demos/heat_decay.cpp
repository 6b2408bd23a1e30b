// Smallest possible tour: march the heat eigenfunction and compare with the
// closed form e^{-nu t} cos x.

#include <cstdio>

#include "heatlab/heatlab.hpp"

int main() {
  using namespace heatlab;

  SpaceGrid grid(1, 64, M_PI);
  const double nu = 1.0, horizon = 0.5;
  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    g.at(0, i) = std::cos(grid.coord(static_cast<int>(i)));

  CoefficientSet coeffs{DiffusionSchedule::isotropic(1, nu), std::nullopt, std::nullopt,
                        std::nullopt, g};
  const Field u = solve_linear(coeffs, uniform_times(horizon, 200));

  const int last = u.time_count() - 1;
  double err = 0.0;
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    err = std::max(err, std::fabs(u.at(last, 0, i) -
                                  std::exp(-nu * horizon) *
                                      std::cos(grid.coord(static_cast<int>(i)))));
  std::printf("heat eigenfunction after t = %.2f: max error %.3e\n", horizon, err);
  std::printf("||u(T)||_inf = %.6f, expected %.6f\n", linf_norm(u, last),
              std::exp(-nu * horizon));
  return 0;
}
