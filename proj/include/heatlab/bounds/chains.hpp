#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "heatlab/bounds/lemmas.hpp"
#include "heatlab/core/io.hpp"

namespace heatlab {

/// Norm data feeding the a-priori constant chains. Every chain output is
/// nondecreasing in each norm entry; T, nu, gamma, beta and the two dials
/// are parameters, not norms.
struct BoundInputs {
  double T = 1.0;
  double nu = 1.0;
  double gamma = 0.5;
  double C = 1.0;   // generic-constant dial, >= 1
  double Cp = 1.0;  // Calderon-Zygmund dial

  // source f
  double f_inf = 0.0;    // sup_t ||f(t,.)||_inf
  double f_gamma = 0.0;  // sup_t [f(t,.)]_gamma
  double df_inf = 0.0;   // sup_t ||Df(t,.)||_inf
  // initial datum g
  double g_inf = 0.0;
  double dg_inf = 0.0;
  double d2g_inf = 0.0;
  double d2g_gamma = 0.0;
  // drift b and zero-order c (linear chains)
  double b_inf = 0.0;
  double b_gamma = 0.0;
  double c_inf = 0.0;
  double c_gamma = 0.0;
  // decay / energy data (semi Navier-Stokes chains)
  double beta = 0.0;
  double g_l2 = 0.0;
  double f_l2l2 = 0.0;  // (int_0^T ||f(s)||_L2^2 ds)^{1/2}
  double f_beta = 0.0;
  double df_beta = 0.0;
  double g_beta = 0.0;
  double dg_beta = 0.0;
  double d2g_beta = 0.0;

  void validate() const {
    auto nonneg = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("BoundInputs: ") + name + " must be finite and >= 0");
    };
    if (!(T > 0.0)) throw std::invalid_argument("BoundInputs: T must be positive");
    if (!(nu > 0.0)) throw std::invalid_argument("BoundInputs: nu must be positive");
    if (!(gamma > 0.0) || !(gamma < 1.0))
      throw std::invalid_argument("BoundInputs: gamma must lie in (0,1)");
    if (!(C >= 1.0)) throw std::invalid_argument("BoundInputs: dial C must be >= 1");
    if (!(Cp > 0.0)) throw std::invalid_argument("BoundInputs: dial Cp must be positive");
    nonneg(f_inf, "f_inf");
    nonneg(f_gamma, "f_gamma");
    nonneg(df_inf, "df_inf");
    nonneg(g_inf, "g_inf");
    nonneg(dg_inf, "dg_inf");
    nonneg(d2g_inf, "d2g_inf");
    nonneg(d2g_gamma, "d2g_gamma");
    nonneg(b_inf, "b_inf");
    nonneg(b_gamma, "b_gamma");
    nonneg(c_inf, "c_inf");
    nonneg(c_gamma, "c_gamma");
    nonneg(beta, "beta");
    nonneg(g_l2, "g_l2");
    nonneg(f_l2l2, "f_l2l2");
    nonneg(f_beta, "f_beta");
    nonneg(df_beta, "df_beta");
    nonneg(g_beta, "g_beta");
    nonneg(dg_beta, "dg_beta");
    nonneg(d2g_beta, "d2g_beta");
  }

  std::uint64_t hash() const {
    const double data[] = {T,     nu,      gamma,  C,       Cp,     f_inf,  f_gamma, df_inf,
                           g_inf, dg_inf,  d2g_inf, d2g_gamma, b_inf, b_gamma, c_inf,  c_gamma,
                           beta,  g_l2,    f_l2l2, f_beta,  df_beta, g_beta, dg_beta, d2g_beta};
    return fnv1a64(data, sizeof(data));
  }
};

/// Caller-supplied monotone envelopes of the drift / first-order operators.
struct Envelopes {
  std::function<double(double)> drift;              // M_A
  std::function<double(double)> first_order;        // M_P
  std::function<double(double)> first_order_deriv;  // envelope of the Gateaux derivative
};

namespace chain_detail {

// sqrt(T / nu)
inline double sqt(const BoundInputs& in) { return std::sqrt(in.T / in.nu); }
// nu^{-1 + gamma/2} T^{gamma/2}
inline double tg2(const BoundInputs& in) {
  return std::pow(in.nu, -1.0 + 0.5 * in.gamma) * std::pow(in.T, 0.5 * in.gamma);
}
// nu^{-1 + gamma/2} (1 + nu^{-1/2})
inline double holk(const BoundInputs& in) {
  return std::pow(in.nu, -1.0 + 0.5 * in.gamma) * (1.0 + 1.0 / std::sqrt(in.nu));
}

inline double n_unif(const BoundInputs& in) {
  return (in.g_inf + in.T * in.f_inf) * std::exp(in.T * in.c_inf);
}

inline double n_grad(const BoundInputs& in, double b_inf) {
  const double base = sqt(in) * in.f_inf + in.dg_inf + n_unif(in) * in.T * in.c_inf;
  return in.C * base * std::exp(in.C * b_inf * sqt(in));
}

// Interpolation bound on [u]_gamma.
inline double n_holder(const BoundInputs& in, double b_inf) {
  return std::pow(2.0, 1.0 - in.gamma) * std::pow(n_unif(in), 1.0 - in.gamma) *
         std::pow(n_grad(in, b_inf), in.gamma);
}

// ||D^2 u||_inf closed by the circular-argument lemma.
inline double n_hess(const BoundInputs& in, double b_inf, double b_gamma) {
  const double prelim = in.C * tg2(in) * in.f_gamma + in.d2g_inf +
                        in.C * tg2(in) * b_gamma * n_grad(in, b_inf) +
                        in.c_gamma * n_unif(in) + in.c_inf * n_holder(in, b_inf);
  const double self_coef = in.C * tg2(in) * b_inf * std::pow(2.0, 1.0 - in.gamma) *
                           std::pow(n_unif(in), 1.0 - in.gamma);
  return taupe_bound(self_coef, prelim, in.gamma);
}

// Interpolation bound on [D u]_gamma.
inline double n_du_holder(const BoundInputs& in, double b_inf, double b_gamma) {
  return std::pow(2.0, 1.0 - in.gamma) * std::pow(n_grad(in, b_inf), 1.0 - in.gamma) *
         std::pow(n_hess(in, b_inf, b_gamma), in.gamma);
}

inline double n_hess_holder(const BoundInputs& in, double b_inf, double b_gamma) {
  const double pre = in.C * holk(in);
  return pre * in.f_gamma + in.d2g_gamma +
         pre * (b_gamma * n_grad(in, b_inf) + b_inf * n_du_holder(in, b_inf, b_gamma) +
                in.c_gamma * n_unif(in) + in.c_inf * n_holder(in, b_inf));
}

inline double n_dt_unif(const BoundInputs& in, double b_inf, double b_gamma) {
  const double tg = std::pow(in.T, 0.5 * in.gamma);
  return in.f_inf + in.C * tg2(in) * in.f_gamma + in.d2g_inf +
         in.C * (b_inf + tg * b_gamma) * n_grad(in, b_inf) +
         in.C * tg2(in) * b_inf * n_du_holder(in, b_inf, b_gamma) +
         in.C * (in.c_inf + tg2(in) * in.c_gamma) * n_unif(in) +
         in.c_inf * n_holder(in, b_inf);
}

inline double n_dt_holder(const BoundInputs& in, double b_inf, double b_gamma) {
  const double pre = 1.0 + in.C * holk(in);
  return pre * in.f_gamma + in.C * in.d2g_gamma +
         pre * (b_inf * n_du_holder(in, b_inf, b_gamma) + b_gamma * n_grad(in, b_inf) +
                in.c_inf * n_holder(in, b_inf) + in.c_gamma * n_unif(in));
}

// --- quasi-linear chains: the drift norms are replaced by the operator
// envelope evaluated on already-established solution bounds. ---

inline double require_drift(const Envelopes* env) {
  if (!env || !env->drift)
    throw std::invalid_argument("evaluate_chain: quasi chains need the drift envelope M_A");
  return 0.0;
}

inline double n_grad_quasi(const BoundInputs& in, const Envelopes& env) {
  return n_grad(in, env.drift(n_unif(in)));
}

inline double n_holder_quasi(const BoundInputs& in, const Envelopes& env) {
  return std::pow(2.0, 1.0 - in.gamma) * std::pow(n_unif(in), 1.0 - in.gamma) *
         std::pow(n_grad_quasi(in, env), in.gamma);
}

inline double quasi_drift_norm(const BoundInputs& in, const Envelopes& env) {
  return env.drift(n_holder_quasi(in, env));
}

// --- semi Navier-Stokes chains ---

// Fixed q grid for the inf over Hoelder exponents; any admissible q gives a
// valid bound, so restricting the infimum to the grid preserves validity.
inline const std::vector<double>& q_grid() {
  static const std::vector<double> grid{1.05, 1.10, 1.15, 1.20, 1.25, 1.30, 1.35, 1.40, 1.45};
  return grid;
}

inline double ns_energy(const BoundInputs& in) {
  return std::sqrt(2.0) * in.g_l2 * in.g_l2 + 2.0 * in.f_l2l2 * in.f_l2l2;
}

// (t ||f||_inf + ||g||_inf)^{(p-2)/p} (sqrt2 ||g||_2^2 + 2 ||f||_{L2L2}^2)^{2/p}
inline double ns_interp_factor(const BoundInputs& in, double p) {
  return std::pow(in.T * in.f_inf + in.g_inf, (p - 2.0) / p) *
         std::pow(ns_energy(in), 2.0 / p);
}

inline double beta_weight(const BoundInputs& in) {
  return 1.0 + std::pow(in.nu * in.T, 0.5 * in.beta);
}

// exp factor of the gradient chains; extra_weight multiplies the exponent.
inline double ns_grad_exp_factor(const BoundInputs& in, double extra_weight) {
  double best = std::numeric_limits<double>::infinity();
  for (double q : q_grid()) {
    const double p = q / (q - 1.0);
    const double coef = in.Cp * extra_weight * (2.0 * std::pow(q, 1.0 - 1.5 / q) * in.C / (3.0 - 2.0 * q));
    const double expo = coef * ns_interp_factor(in, p) * std::pow(in.nu, -2.0 + 1.5 / q) *
                        std::pow(in.T, (3.0 - 2.0 * q) / (2.0 * q));
    best = std::min(best, std::exp(expo));
  }
  return best;
}

inline double ns_du_inf(const BoundInputs& in) {
  const double base = in.C * sqt(in) * in.f_inf + in.dg_inf;
  return base * ns_grad_exp_factor(in, 1.0);
}

inline double ns_du_beta(const BoundInputs& in) {
  const double w = beta_weight(in);
  const double base = in.C * w * (sqt(in) * in.f_beta + in.dg_beta);
  return base * ns_grad_exp_factor(in, w);
}

inline double ns_u_beta(const BoundInputs& in) {
  const double w = beta_weight(in);
  const double du_beta = ns_du_beta(in);
  double best = std::numeric_limits<double>::infinity();
  for (double q : q_grid()) {
    const double p = q / (q - 1.0);
    const double term = in.Cp * (std::pow(q, 1.0 - 1.5 / q) / (3.0 - q)) *
                        std::pow(in.nu, -1.5 * (q - 1.0) / q) *
                        std::pow(in.T, (3.0 - q) / (2.0 * q)) * du_beta * ns_interp_factor(in, p);
    best = std::min(best, term);
  }
  return in.C * w * (sqt(in) * in.f_beta + in.dg_beta + best);
}

inline double ns_d2_inf(const BoundInputs& in) {
  const double du_beta = ns_du_beta(in);
  const double base = in.C * tg2(in) * in.f_gamma + in.d2g_inf + in.C * sqt(in) * du_beta * du_beta;
  return base * std::exp(in.C * sqt(in) * ns_u_beta(in));
}

inline double ns_d2_beta(const BoundInputs& in) {
  const double w = beta_weight(in);
  const double du_beta = ns_du_beta(in);
  const double base =
      in.C * w * (sqt(in) * in.df_beta + in.d2g_beta + in.C * sqt(in) * du_beta * du_beta);
  return base * std::exp(in.C * w * sqt(in) * ns_u_beta(in));
}

// Shared diagonal/off-diagonal Hoelder core of the Hessian and of the time
// derivative.
inline double ns_holder_core(const BoundInputs& in) {
  const double u_beta = ns_u_beta(in);
  const double du_inf = ns_du_inf(in);
  const double du_beta = ns_du_beta(in);
  const double d2_inf = ns_d2_inf(in);
  const double inner = in.C * du_beta * du_beta + in.C * u_beta * d2_inf;
  const double shared = in.C * std::pow(u_beta, 1.0 - in.gamma) *
                        std::pow(du_inf, 1.0 - in.gamma) * std::pow(inner, in.gamma);
  const double diag = std::pow(in.nu, 0.5 * (in.gamma - 3.0)) * shared;
  const double off = std::pow(in.nu, 0.5 * (in.gamma - 2.0)) * shared;
  return diag + off;
}

inline double ns_d2_holder(const BoundInputs& in) {
  return in.C * holk(in) * in.f_gamma + in.C * in.d2g_gamma + ns_holder_core(in);
}

inline double ns_dt_beta(const BoundInputs& in) {
  const double w = beta_weight(in);
  const double u_beta = ns_u_beta(in);
  const double du_beta = ns_du_beta(in);
  return in.C * w *
         (sqt(in) * in.df_beta + in.d2g_beta + u_beta * du_beta +
          sqt(in) * (du_beta * du_beta + u_beta * ns_d2_beta(in)));
}

inline double ns_dt_holder(const BoundInputs& in) {
  return (in.f_inf + in.f_gamma) + in.d2g_gamma + ns_holder_core(in);
}

// --- first-order non-linear chains ---

inline double nl_du(const BoundInputs& in) {
  return (in.T * in.df_inf + in.dg_inf) * std::exp(in.T * in.c_inf);
}

inline double nl_u(const BoundInputs& in, const Envelopes& env) {
  if (!env.first_order)
    throw std::invalid_argument("evaluate_chain: nl chains need the first-order envelope M_P");
  const double m = env.first_order(nl_du(in));
  return (in.T * in.f_inf + in.g_inf + in.T * m) * std::exp(in.T * (m + in.c_inf));
}

inline double nl_d2(const BoundInputs& in, const Envelopes& env) {
  if (!env.first_order || !env.first_order_deriv)
    throw std::invalid_argument("evaluate_chain: nl_d2 needs M_P and its derivative envelope");
  const double u = nl_u(in, env);
  const double md = env.first_order_deriv(nl_du(in));
  const double base = in.C * sqt(in) * in.df_inf + in.d2g_inf + in.c_inf * u;
  return base * std::exp(2.0 * sqt(in) * md * (1.0 + u));
}

}  // namespace chain_detail

inline const std::vector<std::string>& chain_ids() {
  static const std::vector<std::string> ids{
      "unif",          "grad_linear",     "hess_linear", "hess_holder_linear",
      "dt_unif_linear", "dt_holder_linear",
      "grad_quasi",    "holder_quasi",    "d2_quasi",    "d2_holder_quasi",
      "dt_quasi",      "dt_holder_quasi",
      "ns_energy",     "ns_du_inf",       "ns_du_beta",  "ns_u_beta",
      "ns_d2_inf",     "ns_d2_beta",      "ns_d2_holder", "ns_dt_beta",
      "ns_dt_holder",
      "nl_du",         "nl_u",            "nl_d2"};
  return ids;
}

/// Closed-form evaluation of one a-priori constant chain. Quasi and
/// non-linear chains require the caller-provided operator envelopes.
inline double evaluate_chain(const std::string& chain_id, const BoundInputs& in,
                             const Envelopes* env = nullptr) {
  using namespace chain_detail;
  in.validate();
  if (chain_id == "unif") return n_unif(in);
  if (chain_id == "grad_linear") return n_grad(in, in.b_inf);
  if (chain_id == "hess_linear") return n_hess(in, in.b_inf, in.b_gamma);
  if (chain_id == "hess_holder_linear") return n_hess_holder(in, in.b_inf, in.b_gamma);
  if (chain_id == "dt_unif_linear") return n_dt_unif(in, in.b_inf, in.b_gamma);
  if (chain_id == "dt_holder_linear") return n_dt_holder(in, in.b_inf, in.b_gamma);

  if (chain_id == "grad_quasi") {
    require_drift(env);
    return n_grad_quasi(in, *env);
  }
  if (chain_id == "holder_quasi") {
    require_drift(env);
    return n_holder_quasi(in, *env);
  }
  if (chain_id == "d2_quasi") {
    require_drift(env);
    const double b = quasi_drift_norm(in, *env);
    return n_hess(in, b, b);
  }
  if (chain_id == "d2_holder_quasi") {
    require_drift(env);
    const double b = quasi_drift_norm(in, *env);
    return n_hess_holder(in, b, b);
  }
  if (chain_id == "dt_quasi") {
    require_drift(env);
    const double b = quasi_drift_norm(in, *env);
    return n_dt_unif(in, b, b);
  }
  if (chain_id == "dt_holder_quasi") {
    require_drift(env);
    const double b = quasi_drift_norm(in, *env);
    return n_dt_holder(in, b, b);
  }

  if (chain_id == "ns_energy") return ns_energy(in);
  if (chain_id == "ns_du_inf") return ns_du_inf(in);
  if (chain_id == "ns_du_beta") return ns_du_beta(in);
  if (chain_id == "ns_u_beta") return ns_u_beta(in);
  if (chain_id == "ns_d2_inf") return ns_d2_inf(in);
  if (chain_id == "ns_d2_beta") return ns_d2_beta(in);
  if (chain_id == "ns_d2_holder") return ns_d2_holder(in);
  if (chain_id == "ns_dt_beta") return ns_dt_beta(in);
  if (chain_id == "ns_dt_holder") return ns_dt_holder(in);

  if (chain_id == "nl_du") return nl_du(in);
  if (chain_id == "nl_u") {
    if (!env) throw std::invalid_argument("evaluate_chain: nl chains need envelopes");
    return nl_u(in, *env);
  }
  if (chain_id == "nl_d2") {
    if (!env) throw std::invalid_argument("evaluate_chain: nl chains need envelopes");
    return nl_d2(in, *env);
  }
  throw std::invalid_argument("evaluate_chain: unknown chain id '" + chain_id + "'");
}

/// Append-only record of evaluated chains with their input snapshots.
class BoundLedger {
 public:
  struct Entry {
    std::string chain;
    BoundInputs inputs;
    std::uint64_t inputs_hash;
    double value;
  };

  double evaluate(const std::string& chain_id, const BoundInputs& in,
                  const Envelopes* env = nullptr) {
    const double value = evaluate_chain(chain_id, in, env);
    std::lock_guard<std::mutex> lock(mtx_);
    entries_.push_back(Entry{chain_id, in, in.hash(), value});
    return value;
  }

  const std::vector<Entry>& entries() const { return entries_; }

  void dump_csv(std::ostream& os) const {
    CsvWriter csv(os);
    csv.row({"chain", "inputs_hash", "value"});
    for (const auto& e : entries_) {
      std::ostringstream hash;
      hash << std::hex << e.inputs_hash;
      csv.row({e.chain, hash.str(), CsvWriter::number(e.value)});
    }
  }

  void dump_kv(std::ostream& os) const {
    os.precision(17);
    for (const auto& e : entries_)
      os << e.chain << " = " << e.value << " (inputs " << std::hex << e.inputs_hash << std::dec
         << ")\n";
  }

 private:
  std::vector<Entry> entries_;
  mutable std::mutex mtx_;
};

}  // namespace heatlab
