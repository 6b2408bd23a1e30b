#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatlab/core/grid.hpp"

namespace heatlab {

/// Non-owning view of the samples of one time slice (all components).
struct SliceView {
  const SpaceGrid* grid;
  int components;
  std::span<const double> values;  // components x node_count, component-major

  std::span<const double> component(int c) const {
    const std::int64_t nn = grid->node_count();
    return values.subspan(static_cast<std::size_t>(c) * nn, nn);
  }
};

/// Owning snapshot of a sampled function at a single instant.
class FieldSlice {
 public:
  FieldSlice(SpaceGrid grid, int components)
      : grid_(grid),
        components_(components),
        values_(static_cast<std::size_t>(components) * grid.node_count(), 0.0) {
    if (components < 1) throw std::invalid_argument("FieldSlice: components must be >= 1");
  }

  const SpaceGrid& grid() const { return grid_; }
  int components() const { return components_; }

  double& at(int c, std::int64_t node) { return values_[static_cast<std::size_t>(c) * grid_.node_count() + node]; }
  double at(int c, std::int64_t node) const { return values_[static_cast<std::size_t>(c) * grid_.node_count() + node]; }

  std::span<double> component(int c) {
    return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * grid_.node_count(), grid_.node_count());
  }
  std::span<const double> component(int c) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(c) * grid_.node_count(), grid_.node_count());
  }

  std::span<double> raw() { return values_; }
  std::span<const double> raw() const { return values_; }

  SliceView view() const { return SliceView{&grid_, components_, values_}; }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  SpaceGrid grid_;
  int components_;
  std::vector<double> values_;
};

/// Space-time sampled function: (time, component, node) with a uniform
/// periodic grid. Sample instants are strictly increasing and start at 0.
class Field {
 public:
  Field(SpaceGrid grid, int components, std::vector<double> times)
      : grid_(grid), components_(components), times_(std::move(times)) {
    if (components < 1) throw std::invalid_argument("Field: components must be >= 1");
    if (times_.empty()) throw std::invalid_argument("Field: needs at least one sample instant");
    if (times_.front() != 0.0) throw std::invalid_argument("Field: times must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (!(times_[i] > times_[i - 1]))
        throw std::invalid_argument("Field: times must be strictly increasing");
    values_.assign(static_cast<std::size_t>(times_.size()) * components_ * grid_.node_count(), 0.0);
  }

  const SpaceGrid& grid() const { return grid_; }
  int components() const { return components_; }
  const std::vector<double>& times() const { return times_; }
  int time_count() const { return static_cast<int>(times_.size()); }
  double time(int it) const { return times_.at(it); }

  double& at(int it, int c, std::int64_t node) { return values_[offset(it, c) + node]; }
  double at(int it, int c, std::int64_t node) const { return values_[offset(it, c) + node]; }

  std::span<double> component(int it, int c) {
    return std::span<double>(values_).subspan(offset(it, c), grid_.node_count());
  }
  std::span<const double> component(int it, int c) const {
    return std::span<const double>(values_).subspan(offset(it, c), grid_.node_count());
  }

  SliceView view(int it) const {
    check_time_index(it);
    return SliceView{&grid_, components_,
                     std::span<const double>(values_).subspan(offset(it, 0),
                                                              static_cast<std::size_t>(components_) * grid_.node_count())};
  }

  FieldSlice slice(int it) const {
    check_time_index(it);
    FieldSlice s(grid_, components_);
    auto src = std::span<const double>(values_).subspan(offset(it, 0),
                                                        static_cast<std::size_t>(components_) * grid_.node_count());
    std::copy(src.begin(), src.end(), s.raw().begin());
    return s;
  }

  void set_slice(int it, const FieldSlice& s) {
    check_time_index(it);
    if (s.grid() != grid_ || s.components() != components_)
      throw std::invalid_argument("Field::set_slice: shape mismatch");
    auto dst = std::span<double>(values_).subspan(offset(it, 0), s.raw().size());
    std::copy(s.raw().begin(), s.raw().end(), dst.begin());
  }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  /// Index of the sample instant equal to t (within tol); -1 when absent.
  int find_time(double t, double tol = 1e-10) const {
    for (std::size_t i = 0; i < times_.size(); ++i)
      if (std::fabs(times_[i] - t) <= tol) return static_cast<int>(i);
    return -1;
  }

  std::span<const double> raw() const { return values_; }
  std::span<double> raw() { return values_; }

 private:
  std::size_t offset(int it, int c) const {
    return (static_cast<std::size_t>(it) * components_ + c) * grid_.node_count();
  }
  void check_time_index(int it) const {
    if (it < 0 || it >= time_count()) throw std::out_of_range("Field: time index out of range");
  }

  SpaceGrid grid_;
  int components_;
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Uniform time grid 0 = t_0 < ... < t_{steps} = horizon.
inline std::vector<double> uniform_times(double horizon, int steps) {
  if (steps < 1) throw std::invalid_argument("uniform_times: steps must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("uniform_times: horizon must be positive");
  std::vector<double> times(steps + 1);
  for (int i = 0; i <= steps; ++i) times[i] = horizon * i / steps;
  times[0] = 0.0;
  return times;
}

/// Periodic multilinear interpolation of one component of a slice.
inline double interpolate(const SliceView& s, int c, const double* x) {
  const SpaceGrid& g = *s.grid;
  const int d = g.dim();
  const int n = g.points_per_axis();
  const double h = g.spacing();
  const double L = g.half_width();
  int base[3] = {0, 0, 0};
  double w[3] = {0.0, 0.0, 0.0};
  for (int axis = 0; axis < d; ++axis) {
    double rel = (x[axis] + L) / h;
    double f = std::floor(rel);
    w[axis] = rel - f;
    long j = static_cast<long>(f) % n;
    if (j < 0) j += n;
    base[axis] = static_cast<int>(j);
  }
  auto comp = s.component(c);
  double acc = 0.0;
  const int corners = 1 << d;
  for (int corner = 0; corner < corners; ++corner) {
    double weight = 1.0;
    std::array<int, 3> idx{0, 0, 0};
    for (int axis = 0; axis < d; ++axis) {
      const int up = (corner >> axis) & 1;
      idx[axis] = (base[axis] + up) % n;
      weight *= up ? w[axis] : 1.0 - w[axis];
    }
    acc += weight * comp[g.flatten(idx)];
  }
  return acc;
}

/// Space-time interpolation: multilinear in space, linear in time, clamped
/// to the sampled horizon.
inline double interpolate(const Field& f, int c, double t, const double* x) {
  const auto& times = f.times();
  if (t <= times.front()) return interpolate(f.view(0), c, x);
  if (t >= times.back()) return interpolate(f.view(f.time_count() - 1), c, x);
  const int hi =
      static_cast<int>(std::upper_bound(times.begin() + 1, times.end(), t) - times.begin());
  const int lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * interpolate(f.view(lo), c, x) + w * interpolate(f.view(hi), c, x);
}

}  // namespace heatlab
