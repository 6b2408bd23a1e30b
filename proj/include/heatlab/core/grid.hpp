#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace heatlab {

/// Uniform periodic grid on the box [-L, L)^d.
///
/// Nodes along each axis sit at x_j = -L + j*h with h = 2L/n, so the right
/// boundary +L is identified with -L. Fourier modes on this box carry the
/// wavenumbers xi_m = pi*m/L, m in [-n/2, n/2).
class SpaceGrid {
 public:
  SpaceGrid(int d, int n, double half_width)
      : d_(d), n_(n), half_width_(half_width) {
    if (d < 1 || d > 3) throw std::invalid_argument("SpaceGrid: d must be 1, 2 or 3");
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("SpaceGrid: n must be even and >= 4");
    if (!(half_width > 0.0)) throw std::invalid_argument("SpaceGrid: box half-width must be positive");
    node_count_ = 1;
    for (int axis = 0; axis < d; ++axis) node_count_ *= static_cast<std::int64_t>(n);
  }

  int dim() const { return d_; }
  int points_per_axis() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return 2.0 * half_width_ / n_; }
  std::int64_t node_count() const { return node_count_; }
  double cell_volume() const { return std::pow(spacing(), d_); }

  /// Coordinate of index j along one axis.
  double coord(int j) const { return -half_width_ + j * spacing(); }

  /// Decompose a flat node index (row-major, axis 0 slowest) into per-axis indices.
  std::array<int, 3> unflatten(std::int64_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int axis = d_ - 1; axis >= 0; --axis) {
      idx[axis] = static_cast<int>(flat % n_);
      flat /= n_;
    }
    return idx;
  }

  std::int64_t flatten(const std::array<int, 3>& idx) const {
    std::int64_t flat = 0;
    for (int axis = 0; axis < d_; ++axis) flat = flat * n_ + idx[axis];
    return flat;
  }

  /// Node position; components beyond dim() are zero.
  std::array<double, 3> position(std::int64_t flat) const {
    auto idx = unflatten(flat);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int axis = 0; axis < d_; ++axis) x[axis] = coord(idx[axis]);
    return x;
  }

  /// Signed integer mode for FFT bin k (even n: m in [-n/2, n/2)).
  int signed_mode(int k) const { return k < n_ / 2 ? k : k - n_; }

  /// Wavenumber of FFT bin k: xi = pi * m / L.
  double wavenumber(int k) const { return M_PI * signed_mode(k) / half_width_; }

  /// Minimal-image (torus) distance between two nodes.
  double torus_distance(std::int64_t a, std::int64_t b) const {
    auto ia = unflatten(a);
    auto ib = unflatten(b);
    const double period = 2.0 * half_width_;
    double s = 0.0;
    for (int axis = 0; axis < d_; ++axis) {
      double diff = std::fabs((ia[axis] - ib[axis]) * spacing());
      if (diff > period / 2.0) diff = period - diff;
      s += diff * diff;
    }
    return std::sqrt(s);
  }

  /// Straight-line distance inside the box (no wrap).
  double box_distance(std::int64_t a, std::int64_t b) const {
    auto ia = unflatten(a);
    auto ib = unflatten(b);
    double s = 0.0;
    for (int axis = 0; axis < d_; ++axis) {
      const double diff = (ia[axis] - ib[axis]) * spacing();
      s += diff * diff;
    }
    return std::sqrt(s);
  }

  bool operator==(const SpaceGrid& o) const {
    return d_ == o.d_ && n_ == o.n_ && half_width_ == o.half_width_;
  }
  bool operator!=(const SpaceGrid& o) const { return !(*this == o); }

 private:
  int d_;
  int n_;
  double half_width_;
  std::int64_t node_count_;
};

inline SpaceGrid make_grid(int d, int n, double half_width) {
  return SpaceGrid(d, n, half_width);
}

}  // namespace heatlab
