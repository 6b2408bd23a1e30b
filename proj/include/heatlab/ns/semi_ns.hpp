#pragma once

#include <vector>

#include "heatlab/bounds/chains.hpp"
#include "heatlab/ns/leray.hpp"
#include "heatlab/solve/fixed_point.hpp"

namespace heatlab {

inline void require_vector3(const SpaceGrid& grid, int components) {
  if (grid.dim() != 3 || components != 3)
    throw std::invalid_argument("semi Navier-Stokes: needs d = r = 3");
}

/// Discrete energy balance
///   ||u(t)||_2^2 + 2 nu int_0^t ||Du||_2^2 = ||g||_2^2 + 2 int_0^t <f, u>,
/// all quadratures trapezoidal, residual reported per instant.
struct EnergyLedger {
  std::vector<double> times;
  std::vector<double> kinetic;      // ||u(t)||_L2^2
  std::vector<double> dissipation;  // 2 nu int_0^t ||Du||_L2^2
  std::vector<double> source;       // ||g||_L2^2 + 2 int_0^t <f, u>
  std::vector<double> residual;     // kinetic + dissipation - source
  double max_relative_residual = 0.0;
};

namespace ns_detail {

/// ||Du(t)||_L2^2 through Parseval with the spectral gradient multiplier;
/// identical to l2_norm(fd_gradient(.))^2 up to roundoff.
inline double grad_l2_squared(const SliceView& u) {
  const SpaceGrid& g = *u.grid;
  const std::int64_t nn = g.node_count();
  const int n = g.points_per_axis();
  const int d = g.dim();
  double acc = 0.0;
  for (int c = 0; c < u.components; ++c) {
    auto spectrum = fft_forward(g, u.component(c).data());
    for (std::int64_t i = 0; i < nn; ++i) {
      auto idx = g.unflatten(i);
      double q = 0.0;
      for (int axis = 0; axis < d; ++axis) {
        const double xi = (idx[axis] == n / 2) ? 0.0 : g.wavenumber(idx[axis]);
        q += xi * xi;
      }
      acc += q * std::norm(spectrum[i]);
    }
  }
  return acc * g.cell_volume() / static_cast<double>(nn);
}

inline double inner_l2(const SliceView& a, const SliceView& b) {
  CompensatedSum acc;
  const double hd = a.grid->cell_volume();
  for (int c = 0; c < a.components; ++c) {
    auto ca = a.component(c);
    auto cb = b.component(c);
    for (std::int64_t i = 0; i < a.grid->node_count(); ++i) acc.add(ca[i] * cb[i] * hd);
  }
  return acc.value();
}

}  // namespace ns_detail

inline EnergyLedger energy_ledger(const Field& u, const Field* f, const FieldSlice& g, double nu) {
  require_vector3(u.grid(), u.components());
  if (u.time_count() < 50)
    throw std::invalid_argument("energy_ledger: needs at least 50 time samples");
  if (g.grid() != u.grid() || g.components() != u.components())
    throw std::invalid_argument("energy_ledger: initial datum grid mismatch");
  if (f && (f->grid() != u.grid() || f->components() != u.components()))
    throw std::invalid_argument("energy_ledger: source grid mismatch");

  EnergyLedger ledger;
  ledger.times = u.times();
  const int nt = u.time_count();
  ledger.kinetic.resize(nt);
  ledger.dissipation.resize(nt);
  ledger.source.resize(nt);
  ledger.residual.resize(nt);

  const double g_l2sq = std::pow(l2_norm(g.view()), 2);
  std::vector<double> grad2(nt), fu(nt, 0.0);
  for (int it = 0; it < nt; ++it) {
    const double l2 = l2_norm(u, it);
    ledger.kinetic[it] = l2 * l2;
    grad2[it] = ns_detail::grad_l2_squared(u.view(it));
    if (f) fu[it] = ns_detail::inner_l2(f->view(it), u.view(it));
  }

  double diss = 0.0, src = 0.0, scale = std::max(g_l2sq, ledger.kinetic[0]);
  for (int it = 0; it < nt; ++it) {
    if (it > 0) {
      const double dt = ledger.times[it] - ledger.times[it - 1];
      diss += nu * dt * (grad2[it - 1] + grad2[it]);        // 2 nu * trapezoid
      src += dt * (fu[it - 1] + fu[it]);                    // 2 * trapezoid
    }
    ledger.dissipation[it] = diss;
    ledger.source[it] = g_l2sq + src;
    ledger.residual[it] = ledger.kinetic[it] + diss - ledger.source[it];
    scale = std::max(scale, ledger.kinetic[it] + diss);
  }
  for (int it = 0; it < nt; ++it)
    ledger.max_relative_residual =
        std::max(ledger.max_relative_residual,
                 scale > 0.0 ? std::fabs(ledger.residual[it]) / scale : 0.0);
  return ledger;
}

struct SemiNsResult {
  Field u;
  EnergyLedger ledger;
  IterationTrace trace;
};

/// Picard solver for the "semi" system
///   du/dt + P[u] . Du = nu Lap u + f,   u(0) = g,
/// reusing the quasi-linear machinery with the Leray drift and a = nu I,
/// then populating the energy ledger from the converged solution.
inline SemiNsResult semi_ns_solve(const std::optional<Field>& f, const FieldSlice& g, double nu,
                                  const std::vector<double>& times,
                                  const FixedPointOptions& opts = {}) {
  require_vector3(g.grid(), g.components());
  CoefficientSet coeffs{DiffusionSchedule::isotropic(3, nu), std::nullopt, std::nullopt, f, g};
  QuasiSolveResult solved =
      quasilinear_solve(DriftOperator::leray(), ZeroOrderOperator::zero(), coeffs, times, opts);
  EnergyLedger ledger = energy_ledger(solved.u, f ? &*f : nullptr, g, nu);
  return SemiNsResult{std::move(solved.u), std::move(ledger), std::move(solved.trace)};
}

/// Per-time beta-weighted norms of u, Du, D^2 u and the discrete du/dt,
/// with compliance flags against the decay chains evaluated at each instant
/// (dials and data norms come from `inputs`; its T is overridden per time).
struct BetaDecayReport {
  double beta = 0.0;
  std::vector<double> times;
  std::vector<double> u_beta, du_beta, d2u_beta, dtu_beta;
  std::vector<double> u_bound, du_bound, d2u_bound, dtu_bound;
  bool all_finite = true;
  bool compliant = true;
};

inline BetaDecayReport beta_decay_report(const Field& u, double beta, const BoundInputs& inputs) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta_decay_report: beta must be positive");
  require_vector3(u.grid(), u.components());
  const int nt = u.time_count();
  if (nt < 2) throw std::invalid_argument("beta_decay_report: needs at least two samples");

  BetaDecayReport rep;
  rep.beta = beta;
  rep.times = u.times();
  rep.u_beta.resize(nt);
  rep.du_beta.resize(nt);
  rep.d2u_beta.resize(nt);
  rep.dtu_beta.resize(nt);
  rep.u_bound.resize(nt);
  rep.du_bound.resize(nt);
  rep.d2u_bound.resize(nt);
  rep.dtu_bound.resize(nt);

  for (int it = 0; it < nt; ++it) {
    rep.u_beta[it] = beta_weighted_norm(u, it, beta);
    rep.du_beta[it] = beta_weighted_norm(fd_gradient(u, it).view(), beta);
    rep.d2u_beta[it] = beta_weighted_norm(fd_hessian(u, it).view(), beta);

    // Centered time difference inside, one-sided at the ends.
    FieldSlice dtu(u.grid(), u.components());
    const int lo = it == 0 ? 0 : it - 1;
    const int hi = it == nt - 1 ? nt - 1 : it + 1;
    const double dt = u.time(hi) - u.time(lo);
    auto raw = dtu.raw();
    auto uhi = u.view(hi).values;
    auto ulo = u.view(lo).values;
    for (std::size_t k = 0; k < raw.size(); ++k) raw[k] = (uhi[k] - ulo[k]) / dt;
    rep.dtu_beta[it] = beta_weighted_norm(dtu.view(), beta);

    BoundInputs at = inputs;
    at.beta = beta;
    at.T = std::max(u.time(it), u.time(1));  // chains need T > 0; monotone in T
    rep.u_bound[it] = evaluate_chain("ns_u_beta", at);
    rep.du_bound[it] = evaluate_chain("ns_du_beta", at);
    rep.d2u_bound[it] = evaluate_chain("ns_d2_beta", at);
    rep.dtu_bound[it] = evaluate_chain("ns_dt_beta", at);

    auto finite = [](double v) { return std::isfinite(v); };
    rep.all_finite = rep.all_finite && finite(rep.u_beta[it]) && finite(rep.du_beta[it]) &&
                     finite(rep.d2u_beta[it]) && finite(rep.dtu_beta[it]);
    const double slack = 1e-9;
    rep.compliant = rep.compliant && rep.u_beta[it] <= rep.u_bound[it] * (1.0 + slack) &&
                    rep.du_beta[it] <= rep.du_bound[it] * (1.0 + slack) &&
                    rep.d2u_beta[it] <= rep.d2u_bound[it] * (1.0 + slack) &&
                    rep.dtu_beta[it] <= rep.dtu_bound[it] * (1.0 + slack);
  }
  return rep;
}

}  // namespace heatlab
