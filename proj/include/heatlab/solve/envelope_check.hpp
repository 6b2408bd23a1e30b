#pragma once

#include <random>

#include "heatlab/core/random_fields.hpp"
#include "heatlab/solve/operators.hpp"

namespace heatlab {

/// Randomized verification of the operator growth assumptions on sampled
/// fields. Ratios are measured/allowed, so every ratio <= 1 (+ tolerance)
/// means the inequality holds on the sample set.
struct EnvelopeCheckResult {
  int samples = 0;
  double max_growth_ratio = 0.0;     // ||A(b)||_inf vs M(||b||_inf)
  double max_holder_ratio = 0.0;     // C^gamma_b composite vs M(composite)
  double max_lipschitz_ratio = 0.0;  // ||A(b1)-A(b2)||_inf vs ||b1-b2||_inf M~(.,.)
  bool ok(double tol = 1e-9) const {
    return max_growth_ratio <= 1.0 + tol && max_holder_ratio <= 1.0 + tol &&
           max_lipschitz_ratio <= 1.0 + tol;
  }
};

inline EnvelopeCheckResult check_drift_envelopes(const DriftOperator& op, const SpaceGrid& grid,
                                                 int n_fields, double gamma = 0.5,
                                                 std::uint64_t seed = 11) {
  std::mt19937_64 rng(seed);
  EnvelopeCheckResult res;
  res.samples = n_fields;
  const std::int64_t budget = grid.node_count() * (grid.node_count() - 1) / 2;
  auto composite = [&](const FieldSlice& s) {
    return linf_norm(s.view()) + holder_seminorm(s.view(), gamma, budget);
  };
  for (int k = 0; k < n_fields; ++k) {
    const FieldSlice b1 = random_slice(rng, grid, grid.dim(), 3, 1.0);
    const FieldSlice b2 = random_slice(rng, grid, grid.dim(), 3, 1.0);
    const FieldSlice a1 = op.apply(b1);
    const FieldSlice a2 = op.apply(b2);

    const double m1 = linf_norm(b1.view());
    const double growth_allowed = op.envelope(m1);
    if (growth_allowed > 0.0)
      res.max_growth_ratio = std::max(res.max_growth_ratio, linf_norm(a1.view()) / growth_allowed);

    const double holder_allowed = op.envelope(composite(b1));
    if (holder_allowed > 0.0)
      res.max_holder_ratio = std::max(res.max_holder_ratio, composite(a1) / holder_allowed);

    double diff = 0.0;
    for (std::size_t i = 0; i < b1.raw().size(); ++i)
      diff = std::max(diff, std::fabs(b1.raw()[i] - b2.raw()[i]));
    double adiff = 0.0;
    for (std::size_t i = 0; i < a1.raw().size(); ++i)
      adiff = std::max(adiff, std::fabs(a1.raw()[i] - a2.raw()[i]));
    const double lip_allowed = diff * op.lipschitz(m1, linf_norm(b2.view()));
    if (lip_allowed > 0.0)
      res.max_lipschitz_ratio = std::max(res.max_lipschitz_ratio, adiff / lip_allowed);
  }
  return res;
}

/// Sub-linearity of the zero-order operator: ||C(b)(t)||_inf <= c(t) ||b(t)||_inf.
inline EnvelopeCheckResult check_zero_order_envelope(const ZeroOrderOperator& op,
                                                     const SpaceGrid& grid, int components,
                                                     int n_fields,
                                                     const std::vector<double>& sample_times,
                                                     std::uint64_t seed = 12) {
  std::mt19937_64 rng(seed);
  EnvelopeCheckResult res;
  res.samples = n_fields;
  for (int k = 0; k < n_fields; ++k) {
    const FieldSlice b = random_slice(rng, grid, components, 3, 1.0);
    const double m = linf_norm(b.view());
    for (double t : sample_times) {
      const double allowed = op.rate(t) * m;
      const double measured = linf_norm(op.apply(b, t).view());
      if (allowed > 0.0)
        res.max_growth_ratio = std::max(res.max_growth_ratio, measured / allowed);
      else if (measured > 0.0)
        res.max_growth_ratio = std::max(res.max_growth_ratio, 2.0);  // certificate violated
    }
  }
  res.max_holder_ratio = 0.0;
  res.max_lipschitz_ratio = 0.0;
  return res;
}

/// Growth of the first-order nonlinearity:
/// ||P(u, Du)||_inf <= M_P(||Du||_inf) (1 + ||u||_inf).
inline EnvelopeCheckResult check_first_order_envelope(const FirstOrderNonlinearity& op,
                                                      const SpaceGrid& grid, int n_fields,
                                                      std::uint64_t seed = 13) {
  std::mt19937_64 rng(seed);
  EnvelopeCheckResult res;
  res.samples = n_fields;
  for (int k = 0; k < n_fields; ++k) {
    const FieldSlice u = random_slice(rng, grid, 1, 3, 1.0);
    const FieldSlice du = fd_gradient(u.view());
    const FieldSlice p = op.apply(u, du);
    const double allowed =
        op.envelope(linf_norm(du.view())) * (1.0 + linf_norm(u.view()));
    if (allowed > 0.0)
      res.max_growth_ratio = std::max(res.max_growth_ratio, linf_norm(p.view()) / allowed);
    else if (linf_norm(p.view()) > 0.0)
      res.max_growth_ratio = std::max(res.max_growth_ratio, 2.0);
  }
  res.max_holder_ratio = 0.0;
  res.max_lipschitz_ratio = 0.0;
  return res;
}

}  // namespace heatlab
