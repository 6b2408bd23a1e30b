#pragma once

#include <optional>

#include "heatlab/core/field.hpp"
#include "heatlab/kernel/diffusion.hpp"

namespace heatlab {

/// Drift data for the linear system. Either one d-vector shared by every
/// solution component (the quasi-linear case) or r stacked d-vectors.
struct DriftField {
  Field values;
  bool shared = false;

  static DriftField shared_drift(Field f) { return DriftField{std::move(f), true}; }
  static DriftField per_component(Field f) { return DriftField{std::move(f), false}; }

  /// b_i axis component index inside `values` for solution component i.
  int component_index(int i, int axis, int d) const { return shared ? axis : i * d + axis; }
};

/// Data of the linear parabolic system
///   du/dt + b . Du + c (x) u = D^2 u : a + f,   u(0) = g.
/// b, c, f must be sampled on the solver's time grid; g is the initial slice.
struct CoefficientSet {
  DiffusionSchedule a;
  std::optional<DriftField> b;
  std::optional<Field> c;  // r*r components, row-major coupling matrix
  std::optional<Field> f;  // r components
  FieldSlice g;

  int components() const { return g.components(); }

  void validate_against(const std::vector<double>& times) const {
    auto check_times = [&](const Field& field, const char* name) {
      if (field.time_count() != static_cast<int>(times.size()))
        throw std::invalid_argument(std::string("CoefficientSet: ") + name +
                                    " not sampled on the solver time grid");
      for (std::size_t i = 0; i < times.size(); ++i)
        if (std::fabs(field.time(static_cast<int>(i)) - times[i]) > 1e-10)
          throw std::invalid_argument(std::string("CoefficientSet: ") + name +
                                      " time grid mismatch");
      if (field.grid() != g.grid())
        throw std::invalid_argument(std::string("CoefficientSet: ") + name + " grid mismatch");
    };
    const int r = g.components();
    const int d = g.grid().dim();
    if (a.d != d) throw std::invalid_argument("CoefficientSet: diffusion dimension mismatch");
    if (b) {
      check_times(b->values, "b");
      const int expected = b->shared ? d : r * d;
      if (b->values.components() != expected)
        throw std::invalid_argument("CoefficientSet: drift component count mismatch");
    }
    if (c) {
      check_times(*c, "c");
      if (c->components() != r * r)
        throw std::invalid_argument("CoefficientSet: zero-order coupling must have r*r components");
    }
    if (f) {
      check_times(*f, "f");
      if (f->components() != r)
        throw std::invalid_argument("CoefficientSet: source component count mismatch");
    }
  }
};

}  // namespace heatlab
