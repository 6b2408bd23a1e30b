#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "heatlab/core/field.hpp"
#include "heatlab/core/spectral.hpp"

namespace heatlab {

/// Compensated (Neumaier) summation; fixed accumulation order keeps every
/// reduction deterministic for a given grid.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Distance convention for difference quotients. Torus is the default used
/// for periodic data; Box measures straight-line distance without wrap and
/// suits non-periodic samples truncated to the box.
enum class PairMetric { Torus, Box };

inline double linf_norm(const SliceView& u) {
  double m = 0.0;
  for (int c = 0; c < u.components; ++c)
    for (double v : u.component(c)) m = std::max(m, std::fabs(v));
  return m;
}

inline double linf_norm(const Field& f, int time_index) { return linf_norm(f.view(time_index)); }

inline double lp_norm(const SliceView& u, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  const SpaceGrid& g = *u.grid;
  const double hd = g.cell_volume();
  CompensatedSum acc;
  for (std::int64_t i = 0; i < g.node_count(); ++i) {
    double mag2 = 0.0;
    for (int c = 0; c < u.components; ++c) {
      const double v = u.component(c)[i];
      mag2 += v * v;
    }
    acc.add(std::pow(std::sqrt(mag2), p) * hd);
  }
  return std::pow(acc.value(), 1.0 / p);
}

inline double lp_norm(const Field& f, int time_index, double p) { return lp_norm(f.view(time_index), p); }
inline double l2_norm(const SliceView& u) { return lp_norm(u, 2.0); }
inline double l2_norm(const Field& f, int time_index) { return lp_norm(f.view(time_index), 2.0); }

/// sup over nodes of (1 + |x|^beta) |psi(x)|, |x| Euclidean from the box
/// center: a truncated-domain proxy for the whole-space supremum, meaningful
/// for data supported well inside the box.
inline double beta_weighted_norm(const SliceView& u, double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta_weighted_norm: beta must be >= 0");
  const SpaceGrid& g = *u.grid;
  double m = 0.0;
  for (std::int64_t i = 0; i < g.node_count(); ++i) {
    auto x = g.position(i);
    double r2 = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) r2 += x[axis] * x[axis];
    const double weight = 1.0 + std::pow(std::sqrt(r2), beta);
    for (int c = 0; c < u.components; ++c)
      m = std::max(m, weight * std::fabs(u.component(c)[i]));
  }
  return m;
}

inline double beta_weighted_norm(const Field& f, int time_index, double beta) {
  return beta_weighted_norm(f.view(time_index), beta);
}

namespace norm_detail {

inline double pair_quotient(const SliceView& u, std::int64_t a, std::int64_t b,
                            double gamma, PairMetric metric) {
  const SpaceGrid& g = *u.grid;
  const double dist = metric == PairMetric::Torus ? g.torus_distance(a, b) : g.box_distance(a, b);
  if (!(dist > 0.0)) return 0.0;
  double diff2 = 0.0;
  for (int c = 0; c < u.components; ++c) {
    const double dv = u.component(c)[a] - u.component(c)[b];
    diff2 += dv * dv;
  }
  return std::sqrt(diff2) / std::pow(dist, gamma);
}

}  // namespace norm_detail

/// Lower estimate of the Hoelder seminorm [psi]_gamma from sampled node
/// pairs. All pairs are visited when pair_budget covers them; otherwise a
/// fixed pair stream is consumed in order (every nearest-neighbour pair
/// first, then geometrically strided offsets), so the estimate is monotone
/// nondecreasing in pair_budget. gamma = 1 gives the Lipschitz estimator.
inline double holder_seminorm(const SliceView& u, double gamma, std::int64_t pair_budget,
                              PairMetric metric = PairMetric::Torus) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("holder_seminorm: gamma must lie in (0, 1]");
  const SpaceGrid& g = *u.grid;
  if (pair_budget < g.points_per_axis())
    throw std::invalid_argument("holder_seminorm: pair_budget must be >= n");

  const std::int64_t nn = g.node_count();
  const int d = g.dim();
  const int n = g.points_per_axis();
  double best = 0.0;

  const double all_pairs = 0.5 * static_cast<double>(nn) * static_cast<double>(nn - 1);
  if (static_cast<double>(pair_budget) >= all_pairs && nn <= 1 << 16) {
    for (std::int64_t a = 0; a < nn; ++a)
      for (std::int64_t b = a + 1; b < nn; ++b)
        best = std::max(best, norm_detail::pair_quotient(u, a, b, gamma, metric));
    return best;
  }

  std::int64_t used = 0;
  auto visit = [&](std::int64_t a, const std::array<int, 3>& offset) -> bool {
    auto idx = g.unflatten(a);
    std::array<int, 3> jdx{0, 0, 0};
    for (int axis = 0; axis < d; ++axis) {
      const int raw = idx[axis] + offset[axis];
      if (metric == PairMetric::Box && (raw < 0 || raw >= n)) return true;  // skip, keep going
      jdx[axis] = (raw % n + n) % n;
    }
    const std::int64_t b = g.flatten(jdx);
    if (b == a) return true;
    best = std::max(best, norm_detail::pair_quotient(u, a, b, gamma, metric));
    return ++used < pair_budget;
  };

  // Base nodes are visited in a fixed scrambled order (multiplicative stride
  // coprime to the node count) so a truncated stream still spreads over the
  // whole box.
  std::int64_t scramble = (2654435761LL % nn) | 1;
  while (std::gcd(scramble, nn) != 1) scramble += 2;
  auto scrambled = [&](std::int64_t j) { return (j * scramble) % nn; };

  // Phase 1: all nearest-neighbour pairs along each axis.
  for (int axis = 0; axis < d && used < pair_budget; ++axis) {
    std::array<int, 3> off{0, 0, 0};
    off[axis] = 1;
    for (std::int64_t j = 0; j < nn; ++j)
      if (!visit(scrambled(j), off)) return best;
  }

  // Phase 2: strided offsets (axis-aligned and the main diagonal), base
  // nodes decimated by a fixed step so the stream does not depend on the
  // budget.
  const std::int64_t base_step = std::max<std::int64_t>(1, nn / 4096);
  for (int stride = 2; stride <= n / 2; stride *= 2) {
    for (int dir = 0; dir <= d; ++dir) {
      std::array<int, 3> off{0, 0, 0};
      if (dir < d) {
        off[dir] = stride;
      } else if (d > 1) {
        for (int axis = 0; axis < d; ++axis) off[axis] = stride;
      } else {
        continue;
      }
      for (std::int64_t j = 0; j < nn; j += base_step)
        if (!visit(scrambled(j), off)) return best;
    }
  }

  // Residual budget: sweep remaining separations along axis 0.
  for (int stride = 3; stride < n && used < pair_budget; stride += 2) {
    std::array<int, 3> off{stride, 0, 0};
    for (std::int64_t j = 0; j < nn; j += base_step)
      if (!visit(scrambled(j), off)) return best;
  }
  return best;
}

inline double holder_seminorm(const Field& f, int time_index, double gamma,
                              std::int64_t pair_budget, PairMetric metric = PairMetric::Torus) {
  return holder_seminorm(f.view(time_index), gamma, pair_budget, metric);
}

inline double grad_linf_norm(const SliceView& u) { return linf_norm(fd_gradient(u).view()); }
inline double hess_linf_norm(const SliceView& u) { return linf_norm(fd_hessian(u).view()); }

/// Norm summary of one time slice.
struct NormReport {
  double l_inf = 0.0;
  double holder_gamma = 0.0;   // exponent used
  double holder_value = 0.0;   // seminorm estimate
  double grad_l_inf = 0.0;
  double hess_l_inf = 0.0;
  double l2 = 0.0;
  double lp_p = 2.0;
  double lp_value = 0.0;
  double beta = 0.0;
  double beta_weighted = 0.0;

  std::string to_kv_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "l_inf = " << l_inf << "\n"
       << "holder_gamma = " << holder_gamma << "\n"
       << "holder_value = " << holder_value << "\n"
       << "grad_l_inf = " << grad_l_inf << "\n"
       << "hess_l_inf = " << hess_l_inf << "\n"
       << "l2 = " << l2 << "\n"
       << "lp_p = " << lp_p << "\n"
       << "lp_value = " << lp_value << "\n"
       << "beta = " << beta << "\n"
       << "beta_weighted = " << beta_weighted << "\n";
    return os.str();
  }
};

inline NormReport compute_norm_report(const SliceView& u, double gamma = 0.5, double p = 4.0,
                                      double beta = 0.0, std::int64_t pair_budget = 1 << 14) {
  NormReport r;
  r.l_inf = linf_norm(u);
  r.holder_gamma = gamma;
  r.holder_value = holder_seminorm(u, gamma, pair_budget);
  r.grad_l_inf = grad_linf_norm(u);
  r.hess_l_inf = hess_linf_norm(u);
  r.l2 = l2_norm(u);
  r.lp_p = p;
  r.lp_value = lp_norm(u, p);
  r.beta = beta;
  r.beta_weighted = beta_weighted_norm(u, beta);
  return r;
}

inline NormReport compute_norm_report(const Field& f, int time_index, double gamma = 0.5,
                                      double p = 4.0, double beta = 0.0,
                                      std::int64_t pair_budget = 1 << 14) {
  return compute_norm_report(f.view(time_index), gamma, p, beta, pair_budget);
}

}  // namespace heatlab
