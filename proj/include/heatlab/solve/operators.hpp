#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "heatlab/core/fft.hpp"
#include "heatlab/core/field.hpp"
#include "heatlab/core/spectral.hpp"
#include "heatlab/ns/leray.hpp"

namespace heatlab {

namespace op_detail {

inline double pointwise_magnitude(const SliceView& u, std::int64_t node) {
  double m2 = 0.0;
  for (int c = 0; c < u.components; ++c) {
    const double v = u.component(c)[node];
    m2 += v * v;
  }
  return std::sqrt(m2);
}

/// Exact periodized Gaussian mollifier of width `sigma` applied in Fourier
/// space (unit mass, so the sup norm can only shrink).
inline FieldSlice gaussian_mollify(const FieldSlice& u, double sigma) {
  const SpaceGrid& grid = u.grid();
  const std::int64_t nn = grid.node_count();
  const int d = grid.dim();
  const std::vector<double> xi = wavenumber_table(grid);
  FieldSlice out(grid, u.components());
  for (int c = 0; c < u.components(); ++c) {
    auto spectrum = fft_forward(grid, u.component(c).data());
    for (std::int64_t i = 0; i < nn; ++i) {
      double k2 = 0.0;
      for (int axis = 0; axis < d; ++axis) k2 += xi[i * d + axis] * xi[i * d + axis];
      spectrum[i] *= std::exp(-0.5 * sigma * sigma * k2);
    }
    fft_inverse_real(grid, spectrum, out.component(c).data());
  }
  return out;
}

}  // namespace op_detail

/// Drift operator A(u): maps the r-component solution to the single shared
/// d-vector drift of the transport term (so it requires r = d except for the
/// custom kind). Shipped kinds follow the worked examples:
///   identity     A(u) = u
///   power(k)     A(u) = |u|^k u
///   mollified    A(u) = rho * (|u|^k u), rho a unit-mass Gaussian
///   exponential  A(u) = exp(|u|) u
///   leray        A(u) = P u   (no sup-norm envelope; handled by its own
///                              estimate family)
/// envelope() is the growth bound M with ||A(u)||_inf <= M(||u||_inf);
/// lipschitz() the two-argument bound of ||A(u1) - A(u2)||_inf.
class DriftOperator {
 public:
  enum class Kind { Identity, Power, Mollified, Exponential, Leray, Custom };

  static DriftOperator identity() {
    DriftOperator op(Kind::Identity, "identity");
    op.envelope_ = [](double x) { return x; };
    op.lipschitz_ = [](double, double) { return 1.0; };
    return op;
  }

  static DriftOperator power(double k) {
    DriftOperator op(Kind::Power, "power");
    op.k_ = k;
    op.envelope_ = [k](double x) { return std::pow(x, k + 1.0); };
    op.lipschitz_ = [k](double x, double y) { return (k + 1.0) * std::pow(std::max(x, y), k); };
    return op;
  }

  static DriftOperator mollified(double k, double width) {
    DriftOperator op(Kind::Mollified, "mollified");
    op.k_ = k;
    op.width_ = width;
    // ||rho||_{L^inf(L^1)} = 1 for the normalized Gaussian.
    op.envelope_ = [k](double x) { return std::pow(x, k + 1.0); };
    op.lipschitz_ = [k](double x, double y) { return (k + 1.0) * std::pow(std::max(x, y), k); };
    return op;
  }

  static DriftOperator exponential() {
    DriftOperator op(Kind::Exponential, "exponential");
    op.envelope_ = [](double x) { return x * std::exp(x); };
    op.lipschitz_ = [](double x, double y) {
      const double m = std::max(x, y);
      return std::exp(m) * (1.0 + m);
    };
    return op;
  }

  static DriftOperator leray() { return DriftOperator(Kind::Leray, "leray"); }

  static DriftOperator custom(std::string name,
                              std::function<FieldSlice(const FieldSlice&)> apply,
                              std::function<double(double)> envelope,
                              std::function<double(double, double)> lipschitz) {
    DriftOperator op(Kind::Custom, std::move(name));
    op.custom_ = std::move(apply);
    op.envelope_ = std::move(envelope);
    op.lipschitz_ = std::move(lipschitz);
    return op;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  FieldSlice apply(const FieldSlice& u) const {
    const SpaceGrid& grid = u.grid();
    const int d = grid.dim();
    const std::int64_t nn = grid.node_count();
    switch (kind_) {
      case Kind::Identity:
        require_square(u, d);
        return u;
      case Kind::Power: {
        require_square(u, d);
        FieldSlice out(grid, d);
        for (std::int64_t i = 0; i < nn; ++i) {
          const double mag = op_detail::pointwise_magnitude(u.view(), i);
          const double scale = std::pow(mag, k_);
          for (int c = 0; c < d; ++c) out.at(c, i) = scale * u.at(c, i);
        }
        return out;
      }
      case Kind::Mollified: {
        require_square(u, d);
        FieldSlice powered(grid, d);
        for (std::int64_t i = 0; i < nn; ++i) {
          const double mag = op_detail::pointwise_magnitude(u.view(), i);
          const double scale = std::pow(mag, k_);
          for (int c = 0; c < d; ++c) powered.at(c, i) = scale * u.at(c, i);
        }
        const double sigma = width_ > 0.0 ? width_ : grid.half_width() / 8.0;
        return op_detail::gaussian_mollify(powered, sigma);
      }
      case Kind::Exponential: {
        require_square(u, d);
        FieldSlice out(grid, d);
        for (std::int64_t i = 0; i < nn; ++i) {
          const double mag = op_detail::pointwise_magnitude(u.view(), i);
          const double scale = std::exp(mag);
          for (int c = 0; c < d; ++c) out.at(c, i) = scale * u.at(c, i);
        }
        return out;
      }
      case Kind::Leray:
        return leray_project(u);
      case Kind::Custom:
        return custom_(u);
    }
    throw std::logic_error("DriftOperator: unreachable");
  }

  Field apply(const Field& u) const {
    Field out(u.grid(), u.grid().dim(), u.times());
    for (int it = 0; it < u.time_count(); ++it) out.set_slice(it, apply(u.slice(it)));
    return out;
  }

  bool has_envelope() const { return static_cast<bool>(envelope_); }

  double envelope(double x) const {
    if (!envelope_)
      throw std::logic_error("DriftOperator '" + name_ + "' has no sup-norm envelope");
    return envelope_(x);
  }

  double lipschitz(double x1, double x2) const {
    if (!lipschitz_)
      throw std::logic_error("DriftOperator '" + name_ + "' has no Lipschitz envelope");
    return lipschitz_(x1, x2);
  }

 private:
  DriftOperator(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  static void require_square(const FieldSlice& u, int d) {
    if (u.components() != d)
      throw std::invalid_argument("DriftOperator: this kind requires r = d");
  }

  Kind kind_;
  std::string name_;
  double k_ = 0.0;
  double width_ = 0.0;
  std::function<FieldSlice(const FieldSlice&)> custom_;
  std::function<double(double)> envelope_;
  std::function<double(double, double)> lipschitz_;
};

/// Zero-order operator C(u), entering the fixed point as a frozen source.
/// The sub-linearity certificate is ||C(u)(t)||_inf <= c(t) ||u(t)||_inf.
class ZeroOrderOperator {
 public:
  enum class Kind { Zero, LinearC, Custom };

  static ZeroOrderOperator zero() {
    ZeroOrderOperator op(Kind::Zero);
    op.rate_ = [](double) { return 0.0; };
    return op;
  }

  /// C(u) = -coupling (x) u with coupling an r*r matrix field; the sign
  /// matches the equation form du/dt + A(u).Du = D^2u:a + C(u) + f.
  static ZeroOrderOperator linear(Field coupling) {
    ZeroOrderOperator op(Kind::LinearC);
    op.coupling_ = std::make_shared<Field>(std::move(coupling));
    auto coupling_ptr = op.coupling_;
    op.rate_ = [coupling_ptr](double t) {
      // Max row sum over space at the nearest sampled instant: the operator
      // norm matching the per-component sup convention of linf_norm.
      const Field& cf = *coupling_ptr;
      int it = 0;
      for (int k = 0; k < cf.time_count(); ++k)
        if (std::fabs(cf.time(k) - t) < std::fabs(cf.time(it) - t)) it = k;
      const std::int64_t nn = cf.grid().node_count();
      const int r = static_cast<int>(std::lround(std::sqrt(cf.components())));
      double best = 0.0;
      for (std::int64_t i = 0; i < nn; ++i)
        for (int row = 0; row < r; ++row) {
          double row_sum = 0.0;
          for (int col = 0; col < r; ++col) row_sum += std::fabs(cf.at(it, row * r + col, i));
          best = std::max(best, row_sum);
        }
      return best;
    };
    return op;
  }

  static ZeroOrderOperator custom(std::function<FieldSlice(const FieldSlice&, double)> apply,
                                  std::function<double(double)> rate) {
    ZeroOrderOperator op(Kind::Custom);
    op.custom_ = std::move(apply);
    op.rate_ = std::move(rate);
    return op;
  }

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }

  FieldSlice apply(const FieldSlice& u, double t) const {
    switch (kind_) {
      case Kind::Zero: {
        return FieldSlice(u.grid(), u.components());
      }
      case Kind::LinearC: {
        const Field& cf = *coupling_;
        int it = 0;
        for (int k = 0; k < cf.time_count(); ++k)
          if (std::fabs(cf.time(k) - t) < std::fabs(cf.time(it) - t)) it = k;
        const int r = u.components();
        const std::int64_t nn = u.grid().node_count();
        FieldSlice out(u.grid(), r);
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) {
            auto ccomp = cf.component(it, i * r + j);
            auto ucomp = u.component(j);
            auto acc = out.component(i);
            for (std::int64_t k = 0; k < nn; ++k) acc[k] -= ccomp[k] * ucomp[k];
          }
        return out;
      }
      case Kind::Custom:
        return custom_(u, t);
    }
    throw std::logic_error("ZeroOrderOperator: unreachable");
  }

  /// Rate c(t) of the sub-linearity certificate.
  double rate(double t) const { return rate_(t); }

  double rate_sup(const std::vector<double>& times) const {
    double m = 0.0;
    for (double t : times) m = std::max(m, rate_(t));
    return m;
  }

 private:
  explicit ZeroOrderOperator(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::shared_ptr<Field> coupling_;
  std::function<FieldSlice(const FieldSlice&, double)> custom_;
  std::function<double(double)> rate_;
};

/// First-order nonlinearity P(u, Du) of the fully non-linear system, with
/// its growth envelope M_P and the Gateaux-derivative rule used by the
/// differentiated system.
class FirstOrderNonlinearity {
 public:
  enum class Kind { Zero, KpzSquareGradient, Custom };

  static FirstOrderNonlinearity zero() {
    FirstOrderNonlinearity op(Kind::Zero);
    op.envelope_ = [](double) { return 0.0; };
    op.deriv_envelope_ = [](double) { return 0.0; };
    return op;
  }

  /// P(u, Du) = |Du|^2 (scalar solutions); Gateaux derivative 2 Du . D(.)
  static FirstOrderNonlinearity kpz_square_gradient() {
    FirstOrderNonlinearity op(Kind::KpzSquareGradient);
    op.envelope_ = [](double x) { return x * x; };
    op.deriv_envelope_ = [](double x) { return 2.0 * x; };
    return op;
  }

  static FirstOrderNonlinearity custom(
      std::function<FieldSlice(const FieldSlice&, const FieldSlice&)> apply,
      std::function<FieldSlice(const FieldSlice&, const FieldSlice&)> gateaux_drift,
      std::function<double(double)> envelope, std::function<double(double)> deriv_envelope) {
    FirstOrderNonlinearity op(Kind::Custom);
    op.custom_ = std::move(apply);
    op.custom_drift_ = std::move(gateaux_drift);
    op.envelope_ = std::move(envelope);
    op.deriv_envelope_ = std::move(deriv_envelope);
    return op;
  }

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }

  /// Evaluate P; du carries r*d components (the Jacobian of u).
  FieldSlice apply(const FieldSlice& u, const FieldSlice& du) const {
    switch (kind_) {
      case Kind::Zero:
        return FieldSlice(u.grid(), u.components());
      case Kind::KpzSquareGradient: {
        if (u.components() != 1)
          throw std::invalid_argument("kpz_square_gradient: scalar solutions only");
        const std::int64_t nn = u.grid().node_count();
        const int d = u.grid().dim();
        FieldSlice out(u.grid(), 1);
        for (std::int64_t i = 0; i < nn; ++i) {
          double s = 0.0;
          for (int axis = 0; axis < d; ++axis) s += du.at(axis, i) * du.at(axis, i);
          out.at(0, i) = s;
        }
        return out;
      }
      case Kind::Custom:
        return custom_(u, du);
    }
    throw std::logic_error("FirstOrderNonlinearity: unreachable");
  }

  bool has_gateaux_rule() const {
    return kind_ == Kind::Zero || kind_ == Kind::KpzSquareGradient ||
           static_cast<bool>(custom_drift_);
  }

  /// Shared drift of the differentiated system: D P(u, Du) . D v.
  FieldSlice gateaux_drift(const FieldSlice& u, const FieldSlice& du) const {
    switch (kind_) {
      case Kind::Zero:
        return FieldSlice(u.grid(), u.grid().dim());
      case Kind::KpzSquareGradient: {
        const std::int64_t nn = u.grid().node_count();
        const int d = u.grid().dim();
        FieldSlice out(u.grid(), d);
        for (std::int64_t i = 0; i < nn; ++i)
          for (int axis = 0; axis < d; ++axis) out.at(axis, i) = 2.0 * du.at(axis, i);
        return out;
      }
      case Kind::Custom:
        if (!custom_drift_)
          throw std::logic_error("FirstOrderNonlinearity: missing Gateaux derivative rule");
        return custom_drift_(u, du);
    }
    throw std::logic_error("FirstOrderNonlinearity: unreachable");
  }

  double envelope(double grad_norm) const { return envelope_(grad_norm); }
  double deriv_envelope(double grad_norm) const { return deriv_envelope_(grad_norm); }

 private:
  explicit FirstOrderNonlinearity(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::function<FieldSlice(const FieldSlice&, const FieldSlice&)> custom_;
  std::function<FieldSlice(const FieldSlice&, const FieldSlice&)> custom_drift_;
  std::function<double(double)> envelope_;
  std::function<double(double)> deriv_envelope_;
};

}  // namespace heatlab
