#include <catch2/catch_amalgamated.hpp>

#include "heatlab/core/field.hpp"
#include "heatlab/core/grid.hpp"
#include "heatlab/core/io.hpp"
#include "heatlab/core/norms.hpp"
#include "heatlab/core/random_fields.hpp"
#include "heatlab/core/spectral.hpp"
#include "support/oracles.hpp"

using namespace heatlab;

namespace {

FieldSlice sample_1d(const SpaceGrid& grid, const std::function<double(double)>& fn) {
  FieldSlice s(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    s.at(0, i) = fn(grid.coord(static_cast<int>(i)));
  return s;
}

Field single_time_field(FieldSlice s) {
  Field f(s.grid(), s.components(), {0.0});
  f.set_slice(0, s);
  return f;
}

}  // namespace

TEST_CASE("make_grid basics") {
  const SpaceGrid g = make_grid(1, 8, M_PI);
  CHECK(g.node_count() == 8);
  CHECK(g.spacing() == Catch::Approx(M_PI / 4.0));
  CHECK(make_grid(3, 32, 10.0).node_count() == 32768);
  CHECK_THROWS_AS(make_grid(2, 5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 8, 1.0), std::invalid_argument);
}

TEST_CASE("field invariants") {
  const SpaceGrid g = make_grid(1, 8, 1.0);
  CHECK_THROWS_AS(Field(g, 1, {0.5, 1.0}), std::invalid_argument);  // must start at 0
  CHECK_THROWS_AS(Field(g, 1, {0.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Field(g, 0, {0.0}), std::invalid_argument);
  Field f(g, 2, {0.0, 0.5, 1.0});
  CHECK(f.time_count() == 3);
  CHECK(f.all_finite());
}

TEST_CASE("linf norm") {
  const SpaceGrid g = make_grid(1, 64, M_PI);
  Field zero(g, 1, {0.0});
  CHECK(linf_norm(zero, 0) == 0.0);

  auto cosx = single_time_field(sample_1d(g, [](double x) { return std::cos(x); }));
  const double h = g.spacing();
  CHECK(linf_norm(cosx, 0) == Catch::Approx(1.0).margin(h * h));

  Field scaled = cosx;
  for (double& v : scaled.raw()) v *= 3.0;
  CHECK(linf_norm(scaled, 0) == Catch::Approx(3.0 * linf_norm(cosx, 0)).epsilon(1e-14));
}

TEST_CASE("holder seminorm examples") {
  const SpaceGrid g = make_grid(1, 64, 1.0);
  Field constant(g, 1, {0.0});
  for (double& v : constant.raw()) v = 4.2;
  CHECK(holder_seminorm(constant, 0, 0.5, 1 << 20) == 0.0);

  // Linear profile: Lipschitz constant 1 in the box metric (no wrap; the
  // sawtooth jump at the seam is a feature of the torus metric, checked
  // separately below).
  auto linear = single_time_field(sample_1d(g, [](double x) { return x; }));
  CHECK(holder_seminorm(linear, 0, 1.0, 1 << 20, PairMetric::Box) ==
        Catch::Approx(1.0).margin(1e-12));
  const double h = g.spacing();
  CHECK(holder_seminorm(linear, 0, 1.0, 1 << 20, PairMetric::Torus) ==
        Catch::Approx((2.0 - h) / h).margin(1e-9));

  CHECK_THROWS_AS(holder_seminorm(linear, 0, 1.5, 1 << 20), std::invalid_argument);
  CHECK_THROWS_AS(holder_seminorm(linear, 0, 0.5, 8), std::invalid_argument);  // budget < n
}

TEST_CASE("holder estimator stabilizes and matches brute force") {
  // Oracle at n = 64: every pair.
  const SpaceGrid g64 = make_grid(1, 64, M_PI);
  auto rough64 =
      single_time_field(sample_1d(g64, [](double x) { return std::sqrt(std::fabs(std::sin(x))); }));
  const double oracle = testing::brute_force_holder(rough64.view(0), 0.5, PairMetric::Torus);
  CHECK(holder_seminorm(rough64, 0, 0.5, 1 << 20) == Catch::Approx(oracle).epsilon(1e-12));

  const SpaceGrid g = make_grid(1, 256, M_PI);
  auto rough =
      single_time_field(sample_1d(g, [](double x) { return std::sqrt(std::fabs(std::sin(x))); }));
  double prev = holder_seminorm(rough, 0, 0.5, 256);
  for (std::int64_t budget = 512; budget <= 8192; budget *= 2) {
    const double next = holder_seminorm(rough, 0, 0.5, budget);
    CHECK(next >= prev);  // monotone in the budget
    CHECK(std::fabs(next - prev) <= 0.05 * std::max(prev, 1e-30));
    prev = next;
  }
  CHECK(prev > 0.5);  // the cusp at the zeros of sin has quotient ~ 1
}

TEST_CASE("lp norms") {
  const SpaceGrid g = make_grid(1, 64, 1.0);
  Field ones(g, 1, {0.0});
  for (double& v : ones.raw()) v = 1.0;
  CHECK(lp_norm(ones, 0, 2.0) == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
  CHECK(l2_norm(ones, 0) == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
  CHECK_THROWS_AS(lp_norm(ones, 0, 0.5), std::invalid_argument);

  const SpaceGrid gp = make_grid(1, 128, M_PI);
  auto cosx = single_time_field(sample_1d(gp, [](double x) { return std::cos(x); }));
  CHECK(lp_norm(cosx, 0, 2.0) == Catch::Approx(std::sqrt(M_PI)).margin(1e-3));

  Field zero(g, 1, {0.0});
  CHECK(lp_norm(zero, 0, 3.0) == 0.0);
}

TEST_CASE("beta weighted norm") {
  const SpaceGrid g = make_grid(1, 64, 1.0);
  Field zero(g, 1, {0.0});
  CHECK(beta_weighted_norm(zero, 0, 2.0) == 0.0);

  auto bump = single_time_field(sample_1d(g, [](double x) { return std::exp(-x * x); }));
  CHECK(beta_weighted_norm(bump, 0, 0.0) == Catch::Approx(2.0 * linf_norm(bump, 0)).epsilon(1e-14));
  CHECK_THROWS_AS(beta_weighted_norm(bump, 0, -1.0), std::invalid_argument);

  const SpaceGrid gl = make_grid(1, 512, 20.0);
  auto decaying = single_time_field(
      sample_1d(gl, [](double x) { return 1.0 / (1.0 + std::pow(std::fabs(x), 3.0)); }));
  const double value = beta_weighted_norm(decaying, 0, 3.0);
  const double scan = testing::dense_beta_scan(
      [](double x) { return 1.0 / (1.0 + std::pow(std::fabs(x), 3.0)); }, 3.0, 20.0);
  CHECK(value >= 1.0);
  CHECK(value <= 2.0);
  CHECK(value <= scan * (1.0 + 1e-12));
}

TEST_CASE("spectral derivatives") {
  const SpaceGrid g = make_grid(1, 64, M_PI);
  Field constant(g, 1, {0.0});
  for (double& v : constant.raw()) v = 2.5;
  CHECK(linf_norm(fd_gradient(constant, 0).view()) <= 1e-12);

  auto sinx = single_time_field(sample_1d(g, [](double x) { return std::sin(x); }));
  const FieldSlice grad = fd_gradient(sinx, 0);
  const FieldSlice hess = fd_hessian(sinx, 0);
  double gerr = 0.0, herr = 0.0;
  for (std::int64_t i = 0; i < g.node_count(); ++i) {
    const double x = g.coord(static_cast<int>(i));
    gerr = std::max(gerr, std::fabs(grad.at(0, i) - std::cos(x)));
    herr = std::max(herr, std::fabs(hess.at(0, i) + std::sin(x)));
  }
  CHECK(gerr <= 1e-8);
  CHECK(herr <= 1e-8);
}

TEST_CASE("spectral vs fd4 discrepancy decays at fourth order") {
  std::vector<std::pair<double, double>> samples;
  for (int n : {16, 32, 64, 128}) {
    const SpaceGrid g = make_grid(1, n, M_PI);
    auto smooth = single_time_field(sample_1d(g, [](double x) { return std::exp(std::sin(x)); }));
    const FieldSlice spectral = fd_gradient(smooth, 0, DerivativeMode::Spectral);
    const FieldSlice fd4 = fd_gradient(smooth, 0, DerivativeMode::FD4);
    double diff = 0.0;
    for (std::int64_t i = 0; i < g.node_count(); ++i)
      diff = std::max(diff, std::fabs(spectral.at(0, i) - fd4.at(0, i)));
    samples.emplace_back(g.spacing(), diff);
  }
  // log-log slope in h.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [h, e] : samples) {
    const double lx = std::log(h), ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(samples.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == Catch::Approx(4.0).margin(0.3));
}

TEST_CASE("norm homogeneity and triangle inequality") {
  std::mt19937_64 rng(99);
  const SpaceGrid g = make_grid(1, 64, M_PI);
  for (int trial = 0; trial < 8; ++trial) {
    const FieldSlice a = random_slice(rng, g, 2, 4, 1.0);
    const FieldSlice b = random_slice(rng, g, 2, 4, 1.0);
    FieldSlice scaled = a;
    const double c = -2.7;
    for (double& v : scaled.raw()) v *= c;
    FieldSlice sum = a;
    for (std::size_t i = 0; i < sum.raw().size(); ++i) sum.raw()[i] += b.raw()[i];

    using Norm = std::function<double(const FieldSlice&)>;
    const std::vector<Norm> norms = {
        [](const FieldSlice& s) { return linf_norm(s.view()); },
        [](const FieldSlice& s) { return lp_norm(s.view(), 2.0); },
        [](const FieldSlice& s) { return lp_norm(s.view(), 4.0); },
        [](const FieldSlice& s) { return beta_weighted_norm(s.view(), 1.5); },
        [](const FieldSlice& s) { return holder_seminorm(s.view(), 0.5, 4096); },
    };
    for (const auto& norm : norms) {
      CHECK(norm(scaled) == Catch::Approx(std::fabs(c) * norm(a)).epsilon(1e-12).margin(1e-12));
      CHECK(norm(sum) <= norm(a) + norm(b) + 1e-10);
    }
  }
}

TEST_CASE("interpolation inequality on smooth periodic samples") {
  // [psi]_gamma <= 2^{1-gamma} ||psi||_inf^{1-gamma} ||D psi||_inf^gamma,
  // full pair enumeration, low-degree trigonometric polynomials.
  std::mt19937_64 rng(7);
  const SpaceGrid g = make_grid(1, 64, M_PI);
  const double gamma = 0.5;
  for (int trial = 0; trial < 12; ++trial) {
    const FieldSlice psi = random_slice(rng, g, 1, 3, 1.0);
    const double seminorm = holder_seminorm(psi.view(), gamma, 1 << 21);
    const double bound = std::pow(2.0, 1.0 - gamma) *
                         std::pow(linf_norm(psi.view()), 1.0 - gamma) *
                         std::pow(grad_linf_norm(psi.view()), gamma);
    CHECK(seminorm <= bound * 1.05);
  }
}

TEST_CASE("field container round trip") {
  std::mt19937_64 rng(3);
  const SpaceGrid g = make_grid(2, 8, 1.5);
  Field f = random_field(rng, g, 2, {0.0, 0.25, 0.75}, 2, 1.0, 1.0);
  std::stringstream buf;
  write_field(buf, f);
  const Field back = read_field(buf);
  CHECK(back.grid() == f.grid());
  CHECK(back.components() == f.components());
  REQUIRE(back.raw().size() == f.raw().size());
  for (std::size_t i = 0; i < f.raw().size(); ++i) CHECK(back.raw()[i] == f.raw()[i]);

  std::ostringstream csv;
  write_field_csv(csv, f);
  // header + one row per (time, node)
  const std::string text = csv.str();
  const auto rows = std::count(text.begin(), text.end(), '\n');
  CHECK(rows == 1 + f.time_count() * g.node_count());
  CHECK(text.rfind("t,x1,x2,u1,u2", 0) == 0);
}

TEST_CASE("csv quoting") {
  std::ostringstream os;
  CsvWriter csv(os);
  csv.row({"plain", "with,comma", "with\"quote"});
  CHECK(os.str() == "plain,\"with,comma\",\"with\"\"quote\"\r\n");
}

TEST_CASE("norm report serializes") {
  std::mt19937_64 rng(5);
  const SpaceGrid g = make_grid(1, 32, M_PI);
  const FieldSlice s = random_slice(rng, g, 1, 3, 1.0);
  const NormReport rep = compute_norm_report(s.view(), 0.5, 4.0, 1.0, 4096);
  const std::string text = rep.to_kv_text();
  CHECK(text.find("l_inf = ") != std::string::npos);
  CHECK(text.find("beta_weighted = ") != std::string::npos);
  CHECK(rep.l_inf >= 0.0);
  CHECK(rep.grad_l_inf >= 0.0);
}
