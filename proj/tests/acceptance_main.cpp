// Acceptance suite: one line per criterion, tolerances pinned in code.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "heatlab/heatlab.hpp"
#include "support/oracles.hpp"

using namespace heatlab;
namespace fs = std::filesystem;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

std::string check_time(const Timer& timer, double budget_sec) {
  if (timer.seconds() > budget_sec) {
    std::ostringstream os;
    os << "runtime " << timer.seconds() << " s exceeds " << budget_sec << " s";
    return os.str();
  }
  return "";
}

// --- criteria -------------------------------------------------------------

std::string heat_propagator_exactness() {
  Timer timer;
  SpaceGrid grid(1, 64, M_PI);
  const double nu = 1.0, T = 0.5;
  const auto times = uniform_times(T, 200);  // dt = T/200
  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    g.at(0, i) = std::cos(grid.coord(static_cast<int>(i)));
  CoefficientSet coeffs{DiffusionSchedule::isotropic(1, nu), std::nullopt, std::nullopt,
                        std::nullopt, g};
  const Field u = solve_linear(coeffs, times);
  const double scale = std::exp(-nu * T);
  double rel_err = 0.0;
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    rel_err = std::max(rel_err, std::fabs(u.at(200, 0, i) -
                                          scale * std::cos(grid.coord(static_cast<int>(i)))) /
                                    scale);
  if (rel_err > 1e-6) return "relative error " + std::to_string(rel_err) + " > 1e-6";
  return check_time(timer, 1.0);
}

std::string appendix_a_scalings() {
  Timer timer;
  const auto sched = DiffusionSchedule::isotropic(1, 1.0);
  const auto sweep = geometric_sweep(1e-4, 1e-2, 8);
  for (double gamma : {0.3, 0.5, 0.7}) {
    const double expected[3] = {1.0, 0.5 * (1.0 + gamma), 0.5 * gamma};
    for (int order = 0; order <= 2; ++order) {
      const auto res = kernel_scaling_probe(order, gamma, sweep, sched, 4096, 128);
      if (std::fabs(res.slope - expected[order]) > 0.1) {
        std::ostringstream os;
        os << "gamma " << gamma << " order " << order << ": slope " << res.slope << " vs "
           << expected[order];
        return os.str();
      }
    }
  }
  return check_time(timer, 30.0);
}

std::string feynman_kac_agreement() {
  Timer timer;
  SpaceGrid grid(1, 64, M_PI);
  const double nu = 0.4, T = 0.5;
  const auto times = uniform_times(T, 128);
  std::mt19937_64 rng(1234);
  Field b = random_field(rng, grid, 1, times, 3, 0.5, 1.0);
  Field f = random_field(rng, grid, 1, times, 3, 1.0, 1.0);
  FieldSlice g = random_slice(rng, grid, 1, 3, 1.0);
  const auto sched = DiffusionSchedule::isotropic(1, nu);
  CoefficientSet coeffs{sched, DriftField::per_component(b), std::nullopt, f, g};
  const Field u = solve_linear(coeffs, times);

  SdeSpec sde{1, 1, drift_from_field(b), sched, T};
  const int n_steps = 64;
  const double slack = 2.0 * grid.spacing() * grid.spacing() + 2.0 * T / n_steps;
  for (int p = 0; p < 20; ++p) {
    const std::int64_t node = (3 * p + 1) % grid.node_count();
    const double x = grid.coord(static_cast<int>(node));
    const auto ens = simulate_paths(sde, &x, 0.0, 100000, n_steps, 1234 + 7919 * p);
    const auto est = fk_estimate(ens, g, &f);
    const double diff = std::fabs(est.value[0] - u.at(128, 0, node));
    const double tol = 3.0 * (est.std_error[0] + slack);
    if (diff > tol) {
      std::ostringstream os;
      os << "probe " << p << ": |fk - spectral| = " << diff << " > " << tol;
      return os.str();
    }
  }
  return check_time(timer, 60.0);
}

std::string linear_uniform_bound() {
  SpaceGrid grid(1, 64, M_PI);
  const double nu = 0.5, T = 0.5;
  const auto times = uniform_times(T, 100);
  const auto sched = DiffusionSchedule::isotropic(1, nu);
  for (int run = 0; run < 10; ++run) {
    std::mt19937_64 rng(500 + run);
    Field b = random_field(rng, grid, 2, times, 3, 0.5, 1.0);
    Field c = random_field(rng, grid, 4, times, 3, 0.3, 1.0);
    Field f = random_field(rng, grid, 2, times, 3, 1.0, 1.0);
    FieldSlice g = random_slice(rng, grid, 2, 3, 1.0);

    BoundInputs in = lab_detail::measure_linear_inputs(&b, &c, &f, g, T, nu, 0.5);
    const double bound = evaluate_chain("unif", in);

    CoefficientSet coeffs{sched, DriftField::per_component(b), c, f, g};
    const Field u = solve_linear(coeffs, times);
    double measured = 0.0;
    for (double v : u.raw()) measured = std::max(measured, std::fabs(v));
    if (measured > bound * 1.01) {
      std::ostringstream os;
      os << "run " << run << ": ||u||_inf = " << measured << " > 1.01 x " << bound;
      return os.str();
    }

    // the bound is independent of b: exact equality under drift rescaling
    BoundInputs rescaled = in;
    rescaled.b_inf *= 10.0;
    rescaled.b_gamma *= 10.0;
    if (evaluate_chain("unif", rescaled) != bound)
      return "uniform bound changed under drift rescaling";

    Field b10 = b;
    for (double& v : b10.raw()) v *= 10.0;
    CoefficientSet coeffs10{sched, DriftField::per_component(std::move(b10)), c, f, g};
    const Field u10 = solve_linear(coeffs10, times);
    double measured10 = 0.0;
    for (double v : u10.raw()) measured10 = std::max(measured10, std::fabs(v));
    if (measured10 > bound * 1.01) {
      std::ostringstream os;
      os << "run " << run << " (10x drift): ||u||_inf = " << measured10 << " > 1.01 x " << bound;
      return os.str();
    }
  }
  return "";
}

std::string circular_argument_lemma() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const double a = 10.0 * unif(rng);
    const double b = 10.0 * unif(rng);
    const double eta = 0.05 + 0.9 * unif(rng);
    const double root = testing::largest_root_of_circular_equation(a, b, eta);
    const double x = root * unif(rng);  // admissible: x <= a x^eta + b
    const double bound = taupe_bound(a, b, eta);
    if (x > bound * (1.0 + 1e-12) + 1e-12 || root > bound * (1.0 + 1e-9) + 1e-9) {
      std::ostringstream os;
      os << "counterexample at a=" << a << " b=" << b << " eta=" << eta << ": x=" << x
         << " bound=" << bound;
      return os.str();
    }
  }
  return "";
}

std::string burgers_oracle() {
  Timer timer;
  SpaceGrid grid(1, 256, M_PI);
  const double nu = 0.1, T = 1.0;
  const auto times = uniform_times(T, 256);
  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    g.at(0, i) = -std::sin(grid.coord(static_cast<int>(i)));
  CoefficientSet coeffs{DiffusionSchedule::isotropic(1, nu), std::nullopt, std::nullopt,
                        std::nullopt, g};
  FixedPointOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 400;
  const auto solved = quasilinear_solve(DriftOperator::identity(), ZeroOrderOperator::zero(),
                                        coeffs, times, opts);
  const auto phi0 = burgers_minus_sine_phi0(nu);
  double err = 0.0;
  const int last = solved.u.time_count() - 1;
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    const double x = grid.coord(static_cast<int>(i));
    err = std::max(err, std::fabs(solved.u.at(last, 0, i) -
                                  burgers_cole_hopf_reference(x, T, nu, phi0, M_PI)));
  }
  if (err > 1e-3) return "cole-hopf error " + std::to_string(err) + " > 1e-3";

  FixedPointOptions alt = opts;
  alt.initial_guess = Field(grid, 1, times);
  const auto from_zero = quasilinear_solve(DriftOperator::identity(), ZeroOrderOperator::zero(),
                                           coeffs, times, alt);
  Field broadcast(grid, 1, times);
  for (int it = 0; it < broadcast.time_count(); ++it) broadcast.set_slice(it, g);
  alt.initial_guess = std::move(broadcast);
  const auto from_g = quasilinear_solve(DriftOperator::identity(), ZeroOrderOperator::zero(),
                                        coeffs, times, alt);
  const double diff = testing::max_abs_diff(from_zero.u, from_g.u);
  if (diff > 1e-8) return "initial guesses disagree by " + std::to_string(diff);
  return check_time(timer, 60.0);
}

std::string quasi_operator_suite() {
  SpaceGrid grid(1, 48, M_PI);
  const DriftOperator kinds[] = {DriftOperator::identity(), DriftOperator::power(2.0),
                                 DriftOperator::mollified(2.0, grid.half_width() / 8.0),
                                 DriftOperator::exponential()};
  for (const auto& op : kinds) {
    const auto res = check_drift_envelopes(op, grid, 100, 0.5, 11);
    if (!res.ok())
      return op.name() + ": growth " + std::to_string(res.max_growth_ratio) + ", holder " +
             std::to_string(res.max_holder_ratio) + ", lipschitz " +
             std::to_string(res.max_lipschitz_ratio);
  }
  const auto times = uniform_times(1.0, 4);
  std::mt19937_64 rng(13);
  Field coupling = random_field(rng, grid, 4, times, 3, 0.5, 1.0);
  if (!check_zero_order_envelope(ZeroOrderOperator::linear(std::move(coupling)), grid, 2, 100,
                                 times)
           .ok())
    return "zero-order sub-linearity violated";
  if (!check_first_order_envelope(FirstOrderNonlinearity::kpz_square_gradient(), grid, 100).ok())
    return "first-order growth violated";
  return "";
}

std::string leray_projector() {
  Timer timer;
  SpaceGrid grid(3, 32, M_PI);
  std::mt19937_64 rng(77);

  FieldSlice grad(grid, 3);
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    auto x = grid.position(i);
    grad.at(0, i) = std::cos(x[0]) * std::sin(x[1]) * std::sin(x[2]);
    grad.at(1, i) = std::sin(x[0]) * std::cos(x[1]) * std::sin(x[2]);
    grad.at(2, i) = std::sin(x[0]) * std::sin(x[1]) * std::cos(x[2]);
  }
  if (linf_norm(leray_project(grad).view()) > 1e-10) return "gradient field not annihilated";

  const FieldSlice eig = lab_detail::shifted_sine_eigenfield(grid);
  const FieldSlice peig = leray_project(eig);
  double fixed_diff = 0.0;
  for (std::size_t i = 0; i < eig.raw().size(); ++i)
    fixed_diff = std::max(fixed_diff, std::fabs(peig.raw()[i] - eig.raw()[i]));
  if (fixed_diff > 1e-10) return "divergence-free field moved by " + std::to_string(fixed_diff);

  const FieldSlice v = random_slice(rng, grid, 3, 3, 1.0);
  const FieldSlice w = random_slice(rng, grid, 3, 3, 1.0);
  const FieldSlice pv = leray_project(v);
  const FieldSlice ppv = leray_project(pv);
  double idem = 0.0;
  for (std::size_t i = 0; i < pv.raw().size(); ++i)
    idem = std::max(idem, std::fabs(ppv.raw()[i] - pv.raw()[i]));
  if (idem > 1e-10) return "not idempotent: " + std::to_string(idem);

  auto dot = [&](const FieldSlice& a, const FieldSlice& b2) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.raw().size(); ++i)
      acc.add(a.raw()[i] * b2.raw()[i] * grid.cell_volume());
    return acc.value();
  };
  if (std::fabs(dot(pv, w) - dot(v, leray_project(w))) > 1e-10)
    return "not self-adjoint in the grid inner product";
  return check_time(timer, 10.0);
}

std::string semi_ns_energy() {
  Timer timer;
  SpaceGrid grid(3, 32, M_PI);
  const double nu = 0.5, T = 0.5, f_amp = 0.1;
  const auto times = uniform_times(T, 50);
  const FieldSlice g = lab_detail::shifted_sine_eigenfield(grid);
  Field f(grid, 3, times);
  for (int it = 0; it < f.time_count(); ++it)
    for (std::int64_t i = 0; i < grid.node_count(); ++i) {
      auto x = grid.position(i);
      f.at(it, 0, i) = f_amp * std::cos(x[1]);
      f.at(it, 1, i) = f_amp * std::cos(x[2]);
      f.at(it, 2, i) = f_amp * std::cos(x[0]);
    }

  FixedPointOptions opts;
  opts.tol = 1e-8;
  opts.max_iter = 60;
  const auto result = semi_ns_solve(f, g, nu, times, opts);
  if (!result.trace.converged) return "picard iteration did not converge";
  if (result.ledger.max_relative_residual > 1e-3)
    return "energy residual " + std::to_string(result.ledger.max_relative_residual) + " > 1e-3";

  double f_l2l2_sq = 0.0, f_inf = 0.0;
  std::vector<double> fl2(times.size());
  for (std::size_t it = 0; it < times.size(); ++it) {
    fl2[it] = std::pow(l2_norm(f, static_cast<int>(it)), 2);
    f_inf = std::max(f_inf, linf_norm(f, static_cast<int>(it)));
  }
  for (std::size_t it = 0; it + 1 < times.size(); ++it)
    f_l2l2_sq += 0.5 * (times[it + 1] - times[it]) * (fl2[it] + fl2[it + 1]);
  const double g_l2sq = std::pow(l2_norm(g.view()), 2);
  const double energy_bound = std::sqrt(2.0) * g_l2sq + 2.0 * f_l2l2_sq;
  for (double k : result.ledger.kinetic)
    if (k > energy_bound * 1.01)
      return "energy inequality violated: " + std::to_string(k) + " > 1.01 x " +
             std::to_string(energy_bound);

  double linf = 0.0;
  for (double v : result.u.raw()) linf = std::max(linf, std::fabs(v));
  const double linf_bound = T * f_inf + linf_norm(g.view());
  if (linf > linf_bound * 1.01)
    return "uniform bound violated: " + std::to_string(linf) + " > 1.01 x " +
           std::to_string(linf_bound);
  return check_time(timer, 300.0);
}

std::string semi_ns_beta_decay() {
  auto run = lab_detail::run_decay_case(48, 20.0, 0.5, 50, 0.5, 3.0, 0.5, 1.2, 1e-7, 40);
  if (!run.result.trace.converged) return "picard iteration did not converge";

  BoundInputs in = run.inputs;
  in.Cp = std::max(1e-3, cz_probe(4.0, 200, 2024, 16).max_ratio / 4.0);
  try {
    in.C = calibrate_dial(lab_detail::decay_compliance_cases(run.result.u, 3.0, in), in.Cp);
  } catch (const CalibrationFailure& e) {
    return std::string("estimate-family failure: ") + e.what();
  }
  const auto report = beta_decay_report(run.result.u, 3.0, in);
  if (!report.all_finite) return "a beta-norm series is not finite";
  if (!report.compliant) return "a beta-norm series exceeds its calibrated chain";
  return "";
}

std::string kpz_oracle() {
  SpaceGrid grid(1, 256, M_PI);
  const double nu = 0.25, T = 0.5, amp = 0.4;
  const auto times = uniform_times(T, 256);
  auto g_fn = [amp](double x) { return amp * std::sin(x) + 0.5 * amp * std::cos(2.0 * x); };
  FieldSlice g(grid, 1);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    g.at(0, i) = g_fn(grid.coord(static_cast<int>(i)));
  CoefficientSet coeffs{DiffusionSchedule::isotropic(1, nu), std::nullopt, std::nullopt,
                        std::nullopt, g};
  FixedPointOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 300;
  const auto sys = gradient_system_solve(FirstOrderNonlinearity::kpz_square_gradient(), nullptr,
                                         coeffs, times, opts);
  double err = 0.0;
  const int last = sys.u.time_count() - 1;
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    const double x = grid.coord(static_cast<int>(i));
    err = std::max(err,
                   std::fabs(sys.u.at(last, 0, i) - kpz_cole_hopf_reference(x, T, nu, g_fn, M_PI)));
  }
  if (err > 1e-3) return "cole-hopf error " + std::to_string(err) + " > 1e-3";

  double grad_diff = 0.0;
  for (int it = 0; it < sys.u.time_count(); ++it) {
    const FieldSlice du = fd_gradient(sys.u, it);
    for (std::int64_t i = 0; i < grid.node_count(); ++i)
      grad_diff = std::max(grad_diff, std::fabs(sys.v.at(it, 0, i) - du.at(0, i)));
  }
  if (grad_diff > 1e-2)
    return "gradient-system mismatch " + std::to_string(grad_diff) + " > 1e-2";
  return "";
}

std::string determinism() {
  const std::map<std::string, Config::Section> reduced{
      {"heat-kernel-scaling",
       {{"n", "512"}, {"points", "4"}, {"time_quad", "32"}, {"t_lo", "1e-3"}, {"t_hi", "1e-2"}}},
      {"linear-bounds", {{"runs", "2"}, {"n", "32"}, {"steps", "20"}}},
      {"fk-vs-spectral",
       {{"probes", "2"}, {"n", "32"}, {"n_paths", "2000"}, {"n_steps", "16"}, {"steps", "32"}}},
      {"burgers-colehopf", {{"resolutions", "32,64"}, {"T", "0.5"}}},
      {"quasi-operator-suite", {{"fields", "10"}, {"n", "16"}}},
      {"semi-ns-energy", {{"n", "16"}, {"steps", "50"}, {"tol", "1e-7"}}},
      {"semi-ns-decay", {{"n", "16"}, {"steps", "50"}, {"tol", "1e-5"}}},
      {"kpz-demo", {{"n", "64"}, {"steps", "64"}, {"tol", "1e-10"}}},
      {"bound-ledger-report", {}},
  };
  for (const auto& id : experiment_ids()) {
    const auto out1 = fs::temp_directory_path() / "heatlab_accept_det1";
    const auto out2 = fs::temp_directory_path() / "heatlab_accept_det2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    ExperimentSpec spec;
    spec.id = id;
    spec.seed = 4321;
    spec.params = reduced.at(id);
    spec.output_dir = out1.string();
    const auto m1 = run_experiment(spec);
    spec.output_dir = out2.string();
    const auto m2 = run_experiment(spec);
    if (m1.checksums.size() != m2.checksums.size()) return id + ": output sets differ";
    for (std::size_t i = 0; i < m1.checksums.size(); ++i) {
      if (m1.checksums[i].second != m2.checksums[i].second)
        return id + ": checksum of " + m1.checksums[i].first + " differs between runs";
      const std::string a = slurp((out1 / id / m1.checksums[i].first).string());
      const std::string b = slurp((out2 / id / m2.checksums[i].first).string());
      if (a != b) return id + ": " + m1.checksums[i].first + " is not byte-identical";
    }
  }
  return "";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<std::string()> run;
  };
  const std::vector<Criterion> criteria{
      {"heat-propagator-exactness", heat_propagator_exactness},
      {"appendix-a-scalings", appendix_a_scalings},
      {"feynman-kac-agreement", feynman_kac_agreement},
      {"linear-uniform-bound", linear_uniform_bound},
      {"circular-argument-lemma", circular_argument_lemma},
      {"burgers-oracle", burgers_oracle},
      {"quasi-operator-suite", quasi_operator_suite},
      {"leray-projector", leray_projector},
      {"semi-ns-energy-identity", semi_ns_energy},
      {"semi-ns-beta-decay", semi_ns_beta_decay},
      {"kpz-oracle", kpz_oracle},
      {"determinism", determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Timer timer;
    std::string verdict;
    try {
      verdict = criterion.run();
    } catch (const std::exception& ex) {
      verdict = std::string("exception: ") + ex.what();
    }
    if (verdict.empty()) {
      std::printf("PASS %-28s (%.1f s)\n", criterion.name, timer.seconds());
    } else {
      ++failures;
      std::printf("FAIL %-28s (%.1f s): %s\n", criterion.name, timer.seconds(), verdict.c_str());
    }
    std::fflush(stdout);
  }
  return failures;
}
