#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "critline/polynomial.hpp"

namespace critline {

// Truncated bivariate Taylor expansion around a fixed base point (a0, b0):
//   x = sum_{i<=order_a, j<=order_b} coeff(i,j) * (a-a0)^i (b-b0)^j.
// coeff(0,0) is the plain value; the (i,j) mixed partial is i!*j!*coeff(i,j).
// Arithmetic requires matching orders and base points.
class BiJet {
 public:
  BiJet(int order_a, int order_b, double base_a, double base_b)
      : na_(order_a), nb_(order_b), a0_(base_a), b0_(base_b),
        c_(static_cast<std::size_t>((order_a + 1) * (order_b + 1)), 0.0) {
    assert(order_a >= 0 && order_b >= 0);
  }

  static BiJet constant(double v, int order_a, int order_b, double base_a,
                        double base_b) {
    BiJet x(order_a, order_b, base_a, base_b);
    x.c_[0] = v;
    return x;
  }

  static BiJet variable_a(double base_a, double base_b, int order_a, int order_b) {
    BiJet x(order_a, order_b, base_a, base_b);
    x.c_[0] = base_a;
    if (order_a >= 1) x.at(1, 0) = 1.0;
    return x;
  }

  static BiJet variable_b(double base_a, double base_b, int order_a, int order_b) {
    BiJet x(order_a, order_b, base_a, base_b);
    x.c_[0] = base_b;
    if (order_b >= 1) x.at(0, 1) = 1.0;
    return x;
  }

  int order_a() const { return na_; }
  int order_b() const { return nb_; }
  double base_a() const { return a0_; }
  double base_b() const { return b0_; }
  double value() const { return c_[0]; }

  double coeff(int i, int j) const { return c_[idx(i, j)]; }
  double mixed_partial(int i, int j) const {
    return factorial(i) * factorial(j) * coeff(i, j);
  }

  BiJet& operator+=(const BiJet& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  BiJet& operator-=(const BiJet& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  BiJet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  BiJet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend BiJet operator+(BiJet x, const BiJet& y) { return x += y; }
  friend BiJet operator-(BiJet x, const BiJet& y) { return x -= y; }
  friend BiJet operator+(BiJet x, double s) { return x += s; }
  friend BiJet operator+(double s, BiJet x) { return x += s; }
  friend BiJet operator-(BiJet x, double s) { return x += -s; }
  friend BiJet operator-(double s, const BiJet& x) {
    BiJet r = -x;
    r.c_[0] += s;
    return r;
  }
  friend BiJet operator*(BiJet x, double s) { return x *= s; }
  friend BiJet operator*(double s, BiJet x) { return x *= s; }
  friend BiJet operator/(BiJet x, double s) { return x *= 1.0 / s; }

  friend BiJet operator-(const BiJet& x) {
    BiJet r = x;
    for (double& v : r.c_) v = -v;
    return r;
  }

  // Truncated Cauchy product. The loops are bounded by the highest
  // nonzero row/column of each operand, which matters a lot here: most
  // intermediates depend on a single variable, so their grids are one
  // nonzero row or column inside an (order_a+1)x(order_b+1) rectangle.
  friend BiJet operator*(const BiJet& x, const BiJet& y) {
    x.check_compatible(y);
    BiJet r(x.na_, x.nb_, x.a0_, x.b0_);
    int xa, xb, ya, yb;
    x.effective_orders(xa, xb);
    y.effective_orders(ya, yb);
    for (int i1 = 0; i1 <= xa; ++i1)
      for (int j1 = 0; j1 <= xb; ++j1) {
        const double v = x.coeff(i1, j1);
        if (v == 0.0) continue;
        const int imax = std::min(x.na_ - i1, ya);
        const int jmax = std::min(x.nb_ - j1, yb);
        for (int i2 = 0; i2 <= imax; ++i2)
          for (int j2 = 0; j2 <= jmax; ++j2)
            r.at(i1 + i2, j1 + j2) += v * y.coeff(i2, j2);
      }
    return r;
  }

  // z with z*y = x up to truncation, by forward substitution in graded
  // order. Requires y.value() != 0.
  friend BiJet operator/(const BiJet& x, const BiJet& y) {
    x.check_compatible(y);
    if (y.value() == 0.0)
      throw std::domain_error("jet division by infinitesimal");
    BiJet z(x.na_, x.nb_, x.a0_, x.b0_);
    const double inv = 1.0 / y.value();
    for (int i = 0; i <= x.na_; ++i)
      for (int j = 0; j <= x.nb_; ++j) {
        double s = x.coeff(i, j);
        for (int p = 0; p <= i; ++p)
          for (int q = 0; q <= j; ++q) {
            if (p == i && q == j) continue;
            s -= z.coeff(p, q) * y.coeff(i - p, j - q);
          }
        z.at(i, j) = s * inv;
      }
    return z;
  }

  friend BiJet operator/(double s, const BiJet& y) {
    return BiJet::constant(s, y.na_, y.nb_, y.a0_, y.b0_) / y;
  }

 private:
  int na_, nb_;
  double a0_, b0_;
  std::vector<double> c_;

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * (nb_ + 1) + j;
  }
  double& at(int i, int j) { return c_[idx(i, j)]; }

  void check_compatible(const BiJet& o) const {
    assert(na_ == o.na_ && nb_ == o.nb_);
    assert(a0_ == o.a0_ && b0_ == o.b0_);
    (void)o;
  }

  void effective_orders(int& ea, int& eb) const {
    ea = 0;
    eb = 0;
    for (int i = 0; i <= na_; ++i)
      for (int j = 0; j <= nb_; ++j)
        if (coeff(i, j) != 0.0) {
          if (i > ea) ea = i;
          if (j > eb) eb = j;
        }
  }

  friend BiJet exp(const BiJet& x);
};

// exp(value) * sum_n z^n/n! with z the nilpotent part of x; the sum is
// exact at n = order_a + order_b and usually terminates earlier.
inline BiJet exp(const BiJet& x) {
  BiJet z = x;
  z.c_[0] = 0.0;
  BiJet acc = BiJet::constant(1.0, x.order_a(), x.order_b(), x.base_a(), x.base_b());
  BiJet term = acc;
  const int nmax = x.order_a() + x.order_b();
  for (int n = 1; n <= nmax; ++n) {
    term = term * z * (1.0 / n);
    bool all_zero = true;
    for (int i = 0; i <= term.order_a() && all_zero; ++i)
      for (int j = 0; j <= term.order_b(); ++j)
        if (term.coeff(i, j) != 0.0) {
          all_zero = false;
          break;
        }
    if (all_zero) break;
    acc += term;
  }
  return acc * std::exp(x.value());
}

inline double scalar_value(const BiJet& x) { return x.value(); }
inline BiJet constant_like(const BiJet& model, double v) {
  return BiJet::constant(v, model.order_a(), model.order_b(), model.base_a(),
                         model.base_b());
}

// Weights w_j = sign^j * p^(j)(c) / j!, so that the operator p(c + sign*D)
// applied to a function with Taylor coefficients t_j is sum_j w_j * j! * t_j.
inline std::vector<double> shifted_operator_weights(const Polynomial& p,
                                                    double center, double sign) {
  std::vector<double> w;
  Polynomial d = p;
  double fact = 1.0;
  double spow = 1.0;
  int j = 0;
  while (!d.coeffs.empty()) {
    if (j > 0) {
      fact *= j;
      spow *= sign;
    }
    w.push_back(spow * d(center) / fact);
    d = derivative(d);
    ++j;
  }
  return w;
}

// sum_{j1,j2} wa[j1] * wb[j2] * (j1,j2) mixed partial of x. This is the
// value of A(D_a) B(D_b) x at the base point for operators with Taylor
// weights wa, wb.
inline double apply_shift_operator(const std::vector<double>& weights_a,
                                   const std::vector<double>& weights_b,
                                   const BiJet& x) {
  auto effective_len = [](const std::vector<double>& w) {
    std::size_t n = w.size();
    while (n > 0 && w[n - 1] == 0.0) --n;
    return n;
  };
  const std::size_t la = effective_len(weights_a);
  const std::size_t lb = effective_len(weights_b);
  if (la > static_cast<std::size_t>(x.order_a() + 1) ||
      lb > static_cast<std::size_t>(x.order_b() + 1))
    throw std::domain_error("insufficient jet order");
  double total = 0.0;
  for (std::size_t j1 = 0; j1 < la; ++j1) {
    if (weights_a[j1] == 0.0) continue;
    for (std::size_t j2 = 0; j2 < lb; ++j2) {
      if (weights_b[j2] == 0.0) continue;
      total += weights_a[j1] * weights_b[j2] *
               x.mixed_partial(static_cast<int>(j1), static_cast<int>(j2));
    }
  }
  return total;
}

}  // namespace critline
