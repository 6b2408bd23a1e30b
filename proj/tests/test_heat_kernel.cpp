#include <catch2/catch_amalgamated.hpp>

#include "heatlab/core/random_fields.hpp"
#include "heatlab/kernel/diffusion.hpp"
#include "heatlab/kernel/gaussian.hpp"
#include "heatlab/kernel/propagator.hpp"
#include "heatlab/kernel/scaling_probe.hpp"
#include "support/oracles.hpp"

using namespace heatlab;

TEST_CASE("accumulate_diffusion") {
  const auto iso = DiffusionSchedule::isotropic(2, 0.7);
  const auto acc = accumulate_diffusion(iso, 0.0, 2.0);
  CHECK(acc.A(0, 0) == Catch::Approx(1.4).margin(1e-13));
  CHECK(acc.A(1, 1) == Catch::Approx(1.4).margin(1e-13));
  CHECK(acc.A(0, 1) == 0.0);

  // a(t) = diag(1 + t, 1) over [0, 1]: Simpson is exact for polynomials.
  auto sched = DiffusionSchedule::of(
      2,
      [](double t) {
        const double diag[2] = {1.0 + t, 1.0};
        return SmallMatrix::diagonal(2, diag);
      },
      1.0, 2.0);
  const auto lin = accumulate_diffusion(sched, 0.0, 1.0);
  CHECK(lin.A(0, 0) == Catch::Approx(1.5).margin(1e-12));
  CHECK(lin.A(1, 1) == Catch::Approx(1.0).margin(1e-12));

  CHECK_THROWS_AS(accumulate_diffusion(iso, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(accumulate_diffusion(iso, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("ellipticity window is spot-checked") {
  auto healthy = DiffusionSchedule::isotropic(3, 0.5);
  CHECK_NOTHROW(healthy.verify_ellipticity(1.0));

  auto lying = DiffusionSchedule::of(
      2, [](double) { return SmallMatrix::identity(2, 0.1); }, 1.0, 1.0);  // claims nu = 1
  CHECK_THROWS_AS(lying.verify_ellipticity(1.0), std::runtime_error);
}

TEST_CASE("cholesky_of_diffusion") {
  const auto iso = DiffusionSchedule::isotropic(2, 0.5);
  const auto sigma = cholesky_of_diffusion(iso, 0.0);
  CHECK(sigma(0, 0) == Catch::Approx(1.0).margin(1e-14));  // sqrt(2 * 0.5)
  CHECK(sigma(1, 0) == 0.0);

  const double diag[2] = {1.0, 4.0};
  auto sched = DiffusionSchedule::constant(SmallMatrix::diagonal(2, diag), 1.0, 4.0);
  const auto s2 = cholesky_of_diffusion(sched, 0.0);
  CHECK(s2(0, 0) == Catch::Approx(std::sqrt(2.0)).margin(1e-14));
  CHECK(s2(1, 1) == Catch::Approx(std::sqrt(8.0)).margin(1e-14));

  SmallMatrix bad = SmallMatrix::identity(2, 1.0);
  bad(0, 1) = 0.5;  // not symmetric
  CHECK_THROWS_AS(DiffusionSchedule::constant(bad, 1.0, 1.0).a(0.0).cholesky(),
                  std::invalid_argument);
}

TEST_CASE("kernel density point values") {
  const SmallMatrix one = SmallMatrix::identity(1, 1.0);
  const double zero = 0.0;
  CHECK(kernel_density(one, &zero) == Catch::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-12));

  // mode at the origin
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    double z[3] = {gauss(rng), gauss(rng), gauss(rng)};
    SmallMatrix a = SmallMatrix::identity(3, 0.5 + std::fabs(gauss(rng)));
    a(0, 1) = a(1, 0) = 0.1;
    const double origin[3] = {0.0, 0.0, 0.0};
    CHECK(kernel_density(a, z) <= kernel_density(a, origin) * (1.0 + 1e-12));
  }

  CHECK_THROWS_AS(kernel_density(SmallMatrix::zero(2), &zero), std::invalid_argument);
}

TEST_CASE("kernel density integrates to one") {
  const double A = 0.8;
  const SmallMatrix m = SmallMatrix::identity(1, A);
  const double L = 14.0;
  const int n = 4000;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double z = -L + 2.0 * L * i / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * kernel_density(m, &z);
  }
  acc *= 2.0 * L / n;
  CHECK(acc == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("kernel density is dominated by the explicit envelope") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double nu = 0.2 + unif(rng);
    const double a_sup = nu + unif(rng);
    const double a_mid = 0.5 * (nu + a_sup);
    const double off = (a_sup - nu) * 0.2 * (2.0 * unif(rng) - 1.0);
    SmallMatrix a = SmallMatrix::identity(2, a_mid);
    a(0, 1) = a(1, 0) = off;
    auto sched = DiffusionSchedule::constant(a, nu * 0.5, a_sup * 1.5);
    const double s = 0.2 + unif(rng);
    const auto acc = accumulate_diffusion(sched, 0.0, s);
    double z[2] = {3.0 * gauss(rng), 3.0 * gauss(rng)};
    const double density = kernel_density(acc, z);
    const double envelope = kernel_envelope(2, sched.nu, sched.a_sup, s, z);
    CHECK(density <= envelope * (1.0 + 1e-12));
  }
}

TEST_CASE("semigroup examples") {
  SpaceGrid grid(1, 64, M_PI);
  const auto sched = DiffusionSchedule::isotropic(1, 0.7);

  FieldSlice ones(grid, 1);
  for (double& v : ones.raw()) v = 1.0;
  const auto ev = semigroup_apply(ones, sched, 0.9);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    CHECK(ev.at(0, i) == Catch::Approx(1.0).margin(1e-12));

  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    g.at(0, i) = std::cos(grid.coord(static_cast<int>(i)));
  const double t = 0.3;
  const auto heat = semigroup_apply(g, sched, t);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    CHECK(heat.at(0, i) ==
          Catch::Approx(std::exp(-0.7 * t) * std::cos(grid.coord(static_cast<int>(i))))
              .margin(1e-8));

  // identity at t <= 0
  const auto same = semigroup_apply(g, sched, 0.0);
  for (std::int64_t i = 0; i < grid.node_count(); ++i) CHECK(same.at(0, i) == g.at(0, i));
}

TEST_CASE("semigroup conserves mass and cancels constants") {
  std::mt19937_64 rng(12);
  SpaceGrid grid(2, 16, 2.0);
  const auto sched = DiffusionSchedule::isotropic(2, 0.4);
  const FieldSlice psi = random_slice(rng, grid, 1, 3, 1.0);
  double mean_before = 0.0;
  for (double v : psi.component(0)) mean_before += v;
  const auto after = semigroup_apply(psi, sched, 0.5);
  double mean_after = 0.0;
  for (double v : after.component(0)) mean_after += v;
  CHECK(mean_after / grid.node_count() ==
        Catch::Approx(mean_before / grid.node_count()).margin(1e-10));

  FieldSlice constant(grid, 1);
  for (double& v : constant.raw()) v = 3.14;
  const auto moved = semigroup_apply(constant, sched, 0.7);
  CHECK(linf_norm(fd_gradient(moved.view()).view()) <= 1e-10);
}

TEST_CASE("green operator examples") {
  SpaceGrid grid(1, 64, M_PI);
  const double nu = 0.5, T = 0.4;
  const auto sched = DiffusionSchedule::isotropic(1, nu);
  const auto times = uniform_times(T, 200);

  Field zero(grid, 1, times);
  const Field gz = green_apply(zero, sched, T, 64);
  for (double v : gz.raw()) CHECK(v == 0.0);

  Field ones(grid, 1, times);
  for (double& v : ones.raw()) v = 1.0;
  const Field g1 = green_apply(ones, sched, T, 64);
  const int last = g1.time_count() - 1;
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    CHECK(g1.at(last, 0, i) == Catch::Approx(T).margin(T / 200.0));

  Field forcing(grid, 1, times);
  for (int it = 0; it < forcing.time_count(); ++it)
    for (std::int64_t i = 0; i < grid.node_count(); ++i)
      forcing.at(it, 0, i) =
          std::exp(-nu * forcing.time(it)) * std::cos(grid.coord(static_cast<int>(i)));
  const Field g2 = green_apply(forcing, sched, T, 200);
  const double expect = T * std::exp(-nu * T);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    CHECK(g2.at(g2.time_count() - 1, 0, i) ==
          Catch::Approx(expect * std::cos(grid.coord(static_cast<int>(i)))).margin(0.02 * expect));

  CHECK_THROWS_AS(green_apply(ones, sched, T + 1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(green_apply(ones, sched, -0.1, 64), std::invalid_argument);
}

TEST_CASE("green operator satisfies the discrete differential relation") {
  // d_t Gf - D^2 Gf : a = f with residual shrinking under refinement.
  const double nu = 0.5, T = 0.4;
  const auto sched = DiffusionSchedule::isotropic(1, nu);
  auto residual_at = [&](int n, int nt) {
    SpaceGrid grid(1, n, M_PI);
    const auto times = uniform_times(T, nt);
    Field f(grid, 1, times);
    for (int it = 0; it < f.time_count(); ++it)
      for (std::int64_t i = 0; i < grid.node_count(); ++i)
        f.at(it, 0, i) =
            std::cos(f.time(it)) * std::exp(std::sin(grid.coord(static_cast<int>(i))));
    const Field G = green_apply(f, sched, T, 200);
    double res = 0.0;
    for (int it = 2; it + 2 < G.time_count(); ++it) {
      const FieldSlice hess = fd_hessian(G, it);
      const double dt2 = G.time(it + 1) - G.time(it - 1);
      for (std::int64_t i = 0; i < grid.node_count(); ++i) {
        const double dtg = (G.at(it + 1, 0, i) - G.at(it - 1, 0, i)) / dt2;
        res = std::max(res, std::fabs(dtg - nu * hess.at(0, i) - f.at(it, 0, i)));
      }
    }
    return res;
  };
  const double coarse = residual_at(32, 40);
  const double fine = residual_at(64, 80);
  CHECK(coarse <= 1e-3);
  CHECK(fine <= coarse);
}

TEST_CASE("kernel scaling probe") {
  const auto sched = DiffusionSchedule::isotropic(1, 1.0);
  const auto sweep = geometric_sweep(1e-4, 1e-2, 8);

  const double gamma = 0.5;
  const double expected[3] = {1.0, 0.5 * (1.0 + gamma), 0.5 * gamma};
  for (int order = 0; order <= 2; ++order) {
    const auto result = kernel_scaling_probe(order, gamma, sweep, sched, 1024, 128);
    CHECK(result.slope == Catch::Approx(expected[order]).margin(0.1));
    CHECK(result.samples.size() == sweep.size());
  }

  CHECK_THROWS_AS(kernel_scaling_probe(3, gamma, sweep, sched), std::invalid_argument);
  CHECK_THROWS_AS(kernel_scaling_probe(1, 1.2, sweep, sched), std::invalid_argument);
  CHECK_THROWS_AS(kernel_scaling_probe(1, gamma, {1e-3, 1e-2, 1e-1}, sched),
                  std::invalid_argument);
}

TEST_CASE("holder modulus of the second derivative stays bounded in T") {
  SpaceGrid grid(1, 512, M_PI);
  const auto sched = DiffusionSchedule::isotropic(1, 1.0);
  const double gamma = 0.5;
  Field zeta(grid, 1, {0.0, 0.05});
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    const double v = std::pow(std::fabs(std::sin(grid.coord(static_cast<int>(i)))), gamma);
    zeta.at(0, 0, i) = v;
    zeta.at(1, 0, i) = v;
  }
  const double zeta_norm = linf_norm(zeta, 0) + holder_seminorm(zeta, 0, gamma, 1 << 16);
  double rmin = 1e300, rmax = 0.0;
  for (double t : geometric_sweep(5e-3, 5e-2, 5)) {
    const Field G = green_apply(zeta, sched, t, 128);
    const double hn = holder_seminorm(fd_hessian(G, G.time_count() - 1).view(), gamma, 1 << 16);
    const double ratio = hn / zeta_norm;
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
  }
  CHECK(rmax / rmin < 3.0);
}

TEST_CASE("semigroup with a time-dependent schedule") {
  // a(t) = nu (1 + t): closed form e^{-nu (t + t^2/2)} cos x.
  SpaceGrid grid(1, 64, M_PI);
  const double nu = 0.6, t = 0.8;
  auto sched = DiffusionSchedule::of(
      1, [nu](double s) { return SmallMatrix::identity(1, nu * (1.0 + s)); }, nu, nu * 2.0);
  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    g.at(0, i) = std::cos(grid.coord(static_cast<int>(i)));
  const auto moved = semigroup_apply(g, sched, t);
  const double scale = std::exp(-nu * (t + 0.5 * t * t));
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    CHECK(moved.at(0, i) ==
          Catch::Approx(scale * std::cos(grid.coord(static_cast<int>(i)))).margin(1e-10));
}

TEST_CASE("semigroup with an anisotropic 2-D schedule") {
  // a = diag(nu1, nu2): cos x1 cos x2 decays at rate nu1 + nu2.
  SpaceGrid grid(2, 32, M_PI);
  const double diag[2] = {0.3, 0.9};
  auto sched = DiffusionSchedule::constant(SmallMatrix::diagonal(2, diag), 0.3, 0.9);
  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    auto x = grid.position(i);
    g.at(0, i) = std::cos(x[0]) * std::cos(x[1]);
  }
  const double t = 0.4;
  const auto moved = semigroup_apply(g, sched, t);
  const double scale = std::exp(-(0.3 + 0.9) * t);
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    auto x = grid.position(i);
    CHECK(moved.at(0, i) ==
          Catch::Approx(scale * std::cos(x[0]) * std::cos(x[1])).margin(1e-10));
  }
}

TEST_CASE("beta-weighted queue control of the semigroup") {
  // ||P~_t g||_beta / ((1 + (nu t)^{beta/2}) ||g||_beta) stays bounded by a
  // stable constant for decaying data on the large box.
  SpaceGrid grid(1, 256, 20.0);
  const double nu = 0.5, beta = 3.0;
  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    const double x = grid.coord(static_cast<int>(i));
    g.at(0, i) = std::exp(-x * x / (2.0 * 1.2 * 1.2));
  }
  const double g_beta = beta_weighted_norm(g.view(), beta);
  const auto sched = DiffusionSchedule::isotropic(1, nu);
  for (double t : {0.05, 0.2, 0.5, 1.0, 2.0, 5.0}) {
    const auto pg = semigroup_apply(g, sched, t);
    const double ratio =
        beta_weighted_norm(pg.view(), beta) / ((1.0 + std::pow(nu * t, beta / 2.0)) * g_beta);
    CHECK(ratio <= 1.5);
  }
}

TEST_CASE("kernel Lq norm identity in three dimensions") {
  // ||h(t, x - .)||_{L^q} = q^{-3/(2q)} (4 pi nu t)^{(3/2)(1-q)/q},
  // checked against radial quadrature of the density to the q-th power.
  const double nut = 0.3;
  for (double q : {1.2, 2.0, 3.0}) {
    double acc = 0.0;
    const int quad = 200000;
    const double radius = 20.0;
    for (int i = 1; i <= quad; ++i) {
      const double r = radius * i / quad;
      const double h = std::pow(4.0 * M_PI * nut, -1.5) * std::exp(-r * r / (4.0 * nut));
      acc += 4.0 * M_PI * r * r * std::pow(h, q) * (radius / quad);
    }
    const double lhs = std::pow(acc, 1.0 / q);
    const double rhs = std::pow(q, -1.5 / q) * std::pow(4.0 * M_PI * nut, 1.5 * (1.0 - q) / q);
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("accumulate_diffusion is exact for cubic schedules") {
  auto cubic = DiffusionSchedule::of(
      1, [](double t) { return SmallMatrix::identity(1, 1.0 + t * t * t); }, 1.0, 2.0);
  const auto acc = accumulate_diffusion(cubic, 0.0, 1.0, 1);  // one Simpson panel
  CHECK(acc.A(0, 0) == Catch::Approx(1.25).margin(1e-14));
}

TEST_CASE("cholesky rejects non-positive-definite diffusion") {
  const double diag[2] = {1.0, -0.5};
  auto bad = DiffusionSchedule::constant(SmallMatrix::diagonal(2, diag), 0.1, 1.0);
  CHECK_THROWS_AS(cholesky_of_diffusion(bad, 0.0), std::invalid_argument);
}

TEST_CASE("fourier propagator equals kernel quadrature") {
  // Dual route: the multiplier exp(-<A xi, xi>) against direct quadrature of
  // the Gaussian kernel, on a box large enough that periodization is
  // negligible.
  SpaceGrid grid(1, 256, 12.0);
  const double nu = 0.5, t = 0.5;
  const auto sched = DiffusionSchedule::isotropic(1, nu);
  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    const double x = grid.coord(static_cast<int>(i));
    g.at(0, i) = std::exp(-x * x / 2.0);
  }
  const auto spectral_route = semigroup_apply(g, sched, t);

  const auto acc = accumulate_diffusion(sched, 0.0, t);
  const double h = grid.spacing();
  double max_err = 0.0;
  for (int probe = 0; probe < 256; probe += 16) {
    const double x = grid.coord(probe);
    double conv = 0.0;
    for (std::int64_t j = 0; j < grid.node_count(); ++j) {
      const double z = x - grid.coord(static_cast<int>(j));
      conv += kernel_density(acc, &z) * g.at(0, j) * h;
    }
    max_err = std::max(max_err, std::fabs(conv - spectral_route.at(0, probe)));
  }
  CHECK(max_err <= 1e-12);
}
