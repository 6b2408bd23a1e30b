#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace heatlab {

/// Dense d x d matrix for d <= 3, row-major. Small enough to pass by value.
struct SmallMatrix {
  int d = 1;
  std::array<double, 9> v{};

  static SmallMatrix zero(int d) {
    SmallMatrix m;
    m.d = d;
    m.v.fill(0.0);
    return m;
  }
  static SmallMatrix identity(int d, double scale = 1.0) {
    SmallMatrix m = zero(d);
    for (int i = 0; i < d; ++i) m(i, i) = scale;
    return m;
  }
  static SmallMatrix diagonal(int d, const double* diag) {
    SmallMatrix m = zero(d);
    for (int i = 0; i < d; ++i) m(i, i) = diag[i];
    return m;
  }

  double& operator()(int i, int j) { return v[i * 3 + j]; }
  double operator()(int i, int j) const { return v[i * 3 + j]; }

  SmallMatrix& operator+=(const SmallMatrix& o) {
    for (int i = 0; i < 9; ++i) v[i] += o.v[i];
    return *this;
  }
  friend SmallMatrix operator+(SmallMatrix a, const SmallMatrix& b) { return a += b; }
  friend SmallMatrix operator*(double s, SmallMatrix m) {
    for (auto& x : m.v) x *= s;
    return m;
  }
  friend SmallMatrix operator-(SmallMatrix a, const SmallMatrix& b) {
    for (int i = 0; i < 9; ++i) a.v[i] -= b.v[i];
    return a;
  }

  bool is_symmetric(double tol = 1e-12) const {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const double scale = std::fabs((*this)(i, j)) + std::fabs((*this)(j, i)) + 1.0;
        if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol * scale) return false;
      }
    return true;
  }

  double det() const {
    const SmallMatrix& m = *this;
    switch (d) {
      case 1:
        return m(0, 0);
      case 2:
        return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      default:
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
  }

  SmallMatrix inverse() const {
    const double dd = det();
    if (!(std::fabs(dd) > 0.0)) throw std::invalid_argument("SmallMatrix: singular");
    const SmallMatrix& m = *this;
    SmallMatrix inv = zero(d);
    const double r = 1.0 / dd;
    switch (d) {
      case 1:
        inv(0, 0) = r;
        break;
      case 2:
        inv(0, 0) = m(1, 1) * r;
        inv(0, 1) = -m(0, 1) * r;
        inv(1, 0) = -m(1, 0) * r;
        inv(1, 1) = m(0, 0) * r;
        break;
      default:
        inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) * r;
        inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) * r;
        inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) * r;
        inv(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) * r;
        inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) * r;
        inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) * r;
        inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) * r;
        inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) * r;
        inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) * r;
        break;
    }
    return inv;
  }

  /// <x M, x>
  double quadratic_form(const double* x) const {
    double acc = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) acc += x[i] * (*this)(i, j) * x[j];
    return acc;
  }

  /// Lower-triangular Cholesky factor with positive diagonal.
  /// Throws on non-symmetric or non-positive-definite input.
  SmallMatrix cholesky() const {
    if (!is_symmetric(1e-10)) throw std::invalid_argument("cholesky: matrix not symmetric");
    SmallMatrix l = zero(d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = (*this)(i, j);
        for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        if (i == j) {
          if (!(s > 0.0)) throw std::invalid_argument("cholesky: matrix not positive definite");
          l(i, i) = std::sqrt(s);
        } else {
          l(i, j) = s / l(j, j);
        }
      }
    }
    return l;
  }

  double frobenius() const {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }
};

}  // namespace heatlab
