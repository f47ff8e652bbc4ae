#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace critline {

// Scalar glue for code that is generic over plain doubles and jet types.
// Jet types supply their own overloads in this namespace; ADL does the rest.
inline double scalar_value(double x) { return x; }
inline double constant_like(double /*model*/, double v) { return v; }

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return b;
}

// Dense univariate polynomial, coeffs[k] multiplies x^k.
struct Polynomial {
  std::vector<double> coeffs;

  Polynomial() = default;
  explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}
  Polynomial(std::initializer_list<double> c) : coeffs(c) {}

  // Index of the last nonzero coefficient; -1 for the zero polynomial.
  int degree() const {
    for (std::size_t k = coeffs.size(); k-- > 0;)
      if (coeffs[k] != 0.0) return static_cast<int>(k);
    return -1;
  }

  bool is_zero() const { return degree() < 0; }

  // Horner evaluation, generic over the scalar algebra.
  template <class T>
  T operator()(const T& x) const {
    if (coeffs.empty()) return constant_like(x, 0.0);
    T acc = constant_like(x, coeffs.back());
    for (std::size_t k = coeffs.size() - 1; k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
  }
};

inline Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  Polynomial r = p.coeffs.size() >= q.coeffs.size() ? p : q;
  const Polynomial& s = p.coeffs.size() >= q.coeffs.size() ? q : p;
  for (std::size_t k = 0; k < s.coeffs.size(); ++k) r.coeffs[k] += s.coeffs[k];
  return r;
}

inline Polynomial operator*(double s, const Polynomial& p) {
  Polynomial r = p;
  for (double& c : r.coeffs) c *= s;
  return r;
}

inline Polynomial operator-(const Polynomial& p, const Polynomial& q) {
  return p + (-1.0) * q;
}

inline Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (p.coeffs.empty() || q.coeffs.empty()) return Polynomial{};
  Polynomial r;
  r.coeffs.assign(p.coeffs.size() + q.coeffs.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.coeffs.size(); ++i)
    for (std::size_t j = 0; j < q.coeffs.size(); ++j)
      r.coeffs[i + j] += p.coeffs[i] * q.coeffs[j];
  return r;
}

inline Polynomial derivative(const Polynomial& p) {
  Polynomial r;
  if (p.coeffs.size() <= 1) return r;
  r.coeffs.resize(p.coeffs.size() - 1);
  for (std::size_t k = 1; k < p.coeffs.size(); ++k)
    r.coeffs[k - 1] = static_cast<double>(k) * p.coeffs[k];
  return r;
}

inline Polynomial antiderivative(const Polynomial& p) {
  Polynomial r;
  r.coeffs.assign(p.coeffs.size() + 1, 0.0);
  for (std::size_t k = 0; k < p.coeffs.size(); ++k)
    r.coeffs[k + 1] = p.coeffs[k] / static_cast<double>(k + 1);
  return r;
}

// q(x) = p(s*x + t), expanded exactly (Horner in polynomial arithmetic).
inline Polynomial compose_affine(const Polynomial& p, double s, double t) {
  Polynomial acc;
  Polynomial base({t, s});
  for (std::size_t k = p.coeffs.size(); k-- > 0;) {
    acc = acc * base;
    if (acc.coeffs.empty()) acc.coeffs.push_back(0.0);
    acc.coeffs[0] += p.coeffs[k];
  }
  return acc;
}

// p(x) shifted up by k powers: x^k * p(x).
inline Polynomial times_power(const Polynomial& p, int k) {
  Polynomial r;
  r.coeffs.assign(p.coeffs.size() + static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) r.coeffs[i + k] = p.coeffs[i];
  return r;
}

namespace detail {

// Closed form of int_0^T mu^k e^{-a mu} dmu, valid while |a*T| stays away
// from 0:  k!/a^{k+1} * (1 - e^{-aT} * sum_{j<=k} (aT)^j/j!).
template <class T>
T exp_moment_closed(int k, const T& a, double upper) {
  using std::exp;
  const T at = a * upper;
  T partial = constant_like(a, 1.0);
  T term = constant_like(a, 1.0);
  for (int j = 1; j <= k; ++j) {
    term = term * at * (1.0 / j);
    partial = partial + term;
  }
  T apow = a;
  for (int j = 0; j < k; ++j) apow = apow * a;
  return (constant_like(a, 1.0) - exp(-at) * partial) * factorial(k) / apow;
}

// Power series sum_{n>=0} (-a)^n T^{k+n+1} / (n! (k+n+1)); removes the a->0
// singularity of the closed form. 30 terms leave a remainder < 1e-14 for
// |aT| < 1.
template <class T>
T exp_moment_series(int k, const T& a, double upper, int terms = 30) {
  T acc = constant_like(a, 0.0);
  T p = constant_like(a, 1.0);  // (-a)^n / n!
  double tpow = 1.0;
  for (int j = 0; j <= k; ++j) tpow *= upper;
  for (int n = 0; n < terms; ++n) {
    acc = acc + p * (tpow / (k + n + 1));
    p = p * (-a) * (1.0 / (n + 1));
    tpow *= upper;
  }
  return acc;
}

}  // namespace detail

// int_0^T mu^k e^{-a mu} dmu for real or jet a; T >= 0. Regime selection on
// the plain value of a so a jet picks one branch for all its coefficients.
template <class T>
T exp_moment(int k, const T& a, double upper, double series_switch = 0.5) {
  if (std::abs(scalar_value(a)) * upper >= series_switch)
    return detail::exp_moment_closed(k, a, upper);
  return detail::exp_moment_series(k, a, upper);
}

// int_0^T p(mu) e^{-a mu} dmu.
template <class T>
T integrate_poly_exp(const Polynomial& p, const T& a, double upper,
                     double series_switch = 0.5) {
  T acc = constant_like(a, 0.0);
  for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
    if (p.coeffs[k] == 0.0) continue;
    acc = acc + exp_moment(static_cast<int>(k), a, upper, series_switch) * p.coeffs[k];
  }
  return acc;
}

}  // namespace critline
