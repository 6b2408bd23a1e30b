#pragma once

#include <optional>
#include <utility>

#include "heatlab/bounds/chains.hpp"
#include "heatlab/solve/linear.hpp"
#include "heatlab/solve/operators.hpp"

namespace heatlab {

struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;  // ||u_{k+1} - u_k||_inf over space-time
  NormReport norms;       // of the new iterate's final slice
  double linf_spacetime = 0.0;
  bool unif_compliant = true;
  bool grad_compliant = true;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
  int iterations = 0;
  double unif_bound = 0.0;  // chain values behind the compliance flags
  double grad_bound = 0.0;
};

/// Non-convergence after max_iter; carries the trace for post-mortems. The
/// underlying existence argument is non-constructive, so a stalled Picard
/// iteration is reported as data rather than silently accepted.
class FixedPointFailure : public std::runtime_error {
 public:
  explicit FixedPointFailure(IterationTrace t)
      : std::runtime_error("fixed-point iteration did not converge within max_iter"),
        trace(std::move(t)) {}
  IterationTrace trace;
};

struct FixedPointOptions {
  double tol = 1e-8;
  int max_iter = 100;
  double damping = 1.0;  // omega in (0, 1]; 1 is plain Picard
  std::optional<Field> initial_guess;
  // Optional compliance monitoring against the quasi chains.
  const BoundInputs* compliance_inputs = nullptr;
  const Envelopes* envelopes = nullptr;
  double compliance_slack = 0.0;
  std::int64_t trace_pair_budget = 4096;
};

namespace fixed_point_detail {

inline double spacetime_linf(const Field& f) {
  double m = 0.0;
  for (double v : f.raw()) m = std::max(m, std::fabs(v));
  return m;
}

inline double spacetime_linf_diff(const Field& a, const Field& b) {
  double m = 0.0;
  auto ra = a.raw();
  auto rb = b.raw();
  for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::fabs(ra[i] - rb[i]));
  return m;
}

inline void blend(Field& next, const Field& prev, double omega) {
  if (omega >= 1.0) return;
  auto rn = next.raw();
  auto rp = prev.raw();
  for (std::size_t i = 0; i < rn.size(); ++i) rn[i] = (1.0 - omega) * rp[i] + omega * rn[i];
}

inline IterationRecord make_record(int iter, double residual, const Field& u,
                                   const FixedPointOptions& opts, double unif_bound,
                                   double grad_bound) {
  IterationRecord rec;
  rec.iteration = iter;
  rec.residual = residual;
  rec.linf_spacetime = spacetime_linf(u);
  const int last = u.time_count() - 1;
  rec.norms = compute_norm_report(u, last, opts.compliance_inputs ? opts.compliance_inputs->gamma : 0.5,
                                  4.0, 0.0, opts.trace_pair_budget);
  if (opts.compliance_inputs) {
    rec.unif_compliant = rec.linf_spacetime <= unif_bound + opts.compliance_slack;
    rec.grad_compliant = rec.norms.grad_l_inf <= grad_bound + opts.compliance_slack;
  }
  return rec;
}

}  // namespace fixed_point_detail

struct QuasiSolveResult {
  Field u;
  IterationTrace trace;
};

/// Picard iteration for the quasi-linear system
///   du/dt + A(u) . Du = D^2 u : a + C(u) + f,   u(0) = g:
/// u_{k+1} solves the linear system with drift A(u_k) and the zero-order
/// term frozen at C(u_k). Optional damping blends consecutive iterates.
/// Throws FixedPointFailure (carrying the trace) when max_iter is exhausted.
inline QuasiSolveResult quasilinear_solve(const DriftOperator& drift_op,
                                          const ZeroOrderOperator& zero_op,
                                          const CoefficientSet& coeffs,
                                          const std::vector<double>& times,
                                          const FixedPointOptions& opts = {}) {
  if (coeffs.b || coeffs.c)
    throw std::invalid_argument(
        "quasilinear_solve: drift and zero-order come from the operators, not the coefficients");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("quasilinear_solve: tol must be positive");
  if (!(opts.damping > 0.0) || opts.damping > 1.0)
    throw std::invalid_argument("quasilinear_solve: damping must lie in (0, 1]");
  coeffs.validate_against(times);
  coeffs.a.verify_ellipticity(times.back());

  IterationTrace trace;
  if (opts.compliance_inputs) {
    trace.unif_bound = evaluate_chain("unif", *opts.compliance_inputs);
    trace.grad_bound =
        opts.envelopes ? evaluate_chain("grad_quasi", *opts.compliance_inputs, opts.envelopes)
                       : evaluate_chain("grad_linear", *opts.compliance_inputs);
  }

  Field u = opts.initial_guess ? *opts.initial_guess : solve_linear(coeffs, times, false);
  const SpaceGrid& grid = coeffs.g.grid();
  const int r = coeffs.components();

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    CoefficientSet step{coeffs.a, std::nullopt, std::nullopt, std::nullopt, coeffs.g};

    step.b = DriftField::shared_drift(drift_op.apply(u));

    if (!zero_op.is_zero() || coeffs.f) {
      Field f_eff(grid, r, times);
      for (int it = 0; it < f_eff.time_count(); ++it) {
        FieldSlice slice(grid, r);
        if (coeffs.f) slice = coeffs.f->slice(it);
        if (!zero_op.is_zero()) {
          const FieldSlice cu = zero_op.apply(u.slice(it), u.time(it));
          auto dst = slice.raw();
          auto src = cu.raw();
          for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        }
        f_eff.set_slice(it, slice);
      }
      step.f = std::move(f_eff);
    }

    Field next = solve_linear(step, times, false);
    fixed_point_detail::blend(next, u, opts.damping);

    const double residual = fixed_point_detail::spacetime_linf_diff(next, u);
    trace.records.push_back(fixed_point_detail::make_record(iter, residual, next, opts,
                                                            trace.unif_bound, trace.grad_bound));
    u = std::move(next);
    trace.iterations = iter;
    if (residual <= opts.tol) {
      trace.converged = true;
      return QuasiSolveResult{std::move(u), std::move(trace)};
    }
  }
  throw FixedPointFailure(std::move(trace));
}

/// Zero-order coupling supplied as a time function returning the r*r matrix
/// entries (row-major).
using TimeMatrixFn = std::function<std::vector<double>(double)>;

inline Field sample_time_matrix(const TimeMatrixFn& fn, const SpaceGrid& grid, int r,
                                const std::vector<double>& times) {
  Field c(grid, r * r, times);
  for (int it = 0; it < c.time_count(); ++it) {
    const std::vector<double> entries = fn(c.time(it));
    if (static_cast<int>(entries.size()) != r * r)
      throw std::invalid_argument("sample_time_matrix: wrong entry count");
    for (int e = 0; e < r * r; ++e) {
      auto comp = c.component(it, e);
      std::fill(comp.begin(), comp.end(), entries[e]);
    }
  }
  return c;
}

/// Picard iteration for the first-order non-linear system
///   du/dt + P(u, Du) + c(t) (x) u = D^2 u : a + f,   u(0) = g,
/// with P frozen at the previous iterate and the (linear) zero-order term
/// handled inside each linear solve.
inline QuasiSolveResult nonlinear_solve(const FirstOrderNonlinearity& p_op, const TimeMatrixFn& c_fn,
                                        const CoefficientSet& coeffs,
                                        const std::vector<double>& times,
                                        const FixedPointOptions& opts = {}) {
  if (coeffs.b || coeffs.c)
    throw std::invalid_argument("nonlinear_solve: pass the nonlinearity via operators");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("nonlinear_solve: tol must be positive");
  coeffs.validate_against(times);
  coeffs.a.verify_ellipticity(times.back());

  const SpaceGrid& grid = coeffs.g.grid();
  const int r = coeffs.components();
  std::optional<Field> c_field;
  if (c_fn) c_field = sample_time_matrix(c_fn, grid, r, times);

  IterationTrace trace;
  if (opts.compliance_inputs) {
    trace.unif_bound = opts.envelopes
                           ? evaluate_chain("nl_u", *opts.compliance_inputs, opts.envelopes)
                           : evaluate_chain("unif", *opts.compliance_inputs);
    trace.grad_bound = evaluate_chain("nl_du", *opts.compliance_inputs);
  }

  CoefficientSet base{coeffs.a, std::nullopt, c_field, coeffs.f, coeffs.g};
  Field u = opts.initial_guess ? *opts.initial_guess : solve_linear(base, times, false);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    CoefficientSet step = base;
    if (!p_op.is_zero()) {
      Field f_eff(grid, r, times);
      for (int it = 0; it < f_eff.time_count(); ++it) {
        FieldSlice slice(grid, r);
        if (coeffs.f) slice = coeffs.f->slice(it);
        const FieldSlice u_slice = u.slice(it);
        const FieldSlice du = fd_gradient(u_slice.view());
        const FieldSlice p = p_op.apply(u_slice, du);
        auto dst = slice.raw();
        auto src = p.raw();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] -= src[k];
        f_eff.set_slice(it, slice);
      }
      step.f = std::move(f_eff);
    }

    Field next = solve_linear(step, times, false);
    fixed_point_detail::blend(next, u, opts.damping);
    const double residual = fixed_point_detail::spacetime_linf_diff(next, u);
    trace.records.push_back(fixed_point_detail::make_record(iter, residual, next, opts,
                                                            trace.unif_bound, trace.grad_bound));
    u = std::move(next);
    trace.iterations = iter;
    if (residual <= opts.tol) {
      trace.converged = true;
      return QuasiSolveResult{std::move(u), std::move(trace)};
    }
  }
  throw FixedPointFailure(std::move(trace));
}

struct GradientSystemResult {
  Field v;  // solves the differentiated system
  Field u;  // underlying solution of the non-linear system
};

/// Differentiated system for v = Du: the Cauchy problem obtained by formally
/// differentiating the non-linear system, with drift given by the Gateaux
/// derivative of P at the converged solution:
///   dv/dt + DP(u, Du) . Dv + c(t) (x) v = D^2 v : a + Df,  v(0) = Dg.
inline GradientSystemResult gradient_system_solve(const FirstOrderNonlinearity& p_op,
                                                  const TimeMatrixFn& c_fn,
                                                  const CoefficientSet& coeffs,
                                                  const std::vector<double>& times,
                                                  const FixedPointOptions& opts = {}) {
  if (!p_op.has_gateaux_rule())
    throw std::invalid_argument("gradient_system_solve: nonlinearity lacks a derivative rule");
  QuasiSolveResult base = nonlinear_solve(p_op, c_fn, coeffs, times, opts);

  const SpaceGrid& grid = coeffs.g.grid();
  const int r = coeffs.components();
  const int d = grid.dim();
  const int rv = r * d;

  Field drift(grid, d, times);
  for (int it = 0; it < drift.time_count(); ++it) {
    const FieldSlice u_slice = base.u.slice(it);
    drift.set_slice(it, p_op.gateaux_drift(u_slice, fd_gradient(u_slice.view())));
  }

  std::optional<Field> cv;
  if (c_fn) {
    // Block extension: c_v[(i,a),(j,b)] = c_ij delta_ab.
    cv = Field(grid, rv * rv, times);
    for (int it = 0; it < cv->time_count(); ++it) {
      const std::vector<double> entries = c_fn(cv->time(it));
      if (static_cast<int>(entries.size()) != r * r)
        throw std::invalid_argument("gradient_system_solve: wrong c entry count");
      for (int i = 0; i < r; ++i)
        for (int a = 0; a < d; ++a)
          for (int j = 0; j < r; ++j) {
            auto comp = cv->component(it, (i * d + a) * rv + (j * d + a));
            std::fill(comp.begin(), comp.end(), entries[i * r + j]);
          }
    }
  }

  std::optional<Field> fv;
  if (coeffs.f) {
    fv = Field(grid, rv, times);
    for (int it = 0; it < fv->time_count(); ++it)
      fv->set_slice(it, fd_gradient(coeffs.f->slice(it).view()));
  }

  CoefficientSet vcoeffs{coeffs.a, DriftField::shared_drift(std::move(drift)), std::move(cv),
                         std::move(fv), fd_gradient(coeffs.g.view())};
  Field v = solve_linear(vcoeffs, times, false);
  return GradientSystemResult{std::move(v), std::move(base.u)};
}

/// Zero drift operator, for reductions of the quasi-linear solver to the
/// plain linear one.
inline DriftOperator zero_drift() {
  return DriftOperator::custom(
      "zero", [](const FieldSlice& u) { return FieldSlice(u.grid(), u.grid().dim()); },
      [](double) { return 0.0; }, [](double, double) { return 0.0; });
}

}  // namespace heatlab
