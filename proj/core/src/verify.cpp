#include "critline/verify.hpp"

#include <cmath>
#include <stdexcept>

#include "critline/quadrature.hpp"

namespace critline {

namespace {

// Integrand after x_i = e^{t_i}: the region becomes the simplex
// t_i >= 0, sum t_i <= L with L = ln D, and the integrand depends only on
// s = sum t_i:  f(e^s) e^{-alpha s}.
double nested_simplex(const QuadratureRule& rule, int depth, double budget,
                      double s, const Polynomial& f, double alpha) {
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = budget * rule.nodes[i];
    const double w = budget * rule.weights[i];
    if (depth == 1) {
      const double sum = s + t;
      total += w * f(std::exp(sum)) * std::exp(-alpha * sum);
    } else {
      total += w * nested_simplex(rule, depth - 1, budget - t, s + t, f, alpha);
    }
  }
  return total;
}

double tuple_sum(const std::vector<std::uint64_t>& primes, int len, int squared,
                 unsigned used, int depth, double acc) {
  if (depth == len) return acc;
  double total = 0.0;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (used & (1u << i)) continue;
    const double lp = std::log(static_cast<double>(primes[i]));
    const double w = (depth < squared) ? lp * lp : lp;
    total += tuple_sum(primes, len, squared, used | (1u << i), depth + 1, acc * w);
  }
  return total;
}

}  // namespace

double lemma36_residual(int m, const Polynomial& f, double D, double alpha,
                        int quad_order) {
  if (m < 1) throw std::domain_error("m must be positive");
  if (!(D > 1.0)) throw std::domain_error("D must exceed 1");
  const QuadratureRule rule = gauss_legendre_01(quad_order);
  const double L = std::log(D);

  const double lhs = nested_simplex(rule, m, L, 0.0, f, alpha);

  // Right side, same substitution: int_0^L f(e^t) e^{-alpha t} t^{m-1}/(m-1)! dt.
  double rhs = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = L * rule.nodes[i];
    double tp = 1.0;
    for (int k = 1; k < m; ++k) tp *= t;
    rhs += L * rule.weights[i] * f(std::exp(t)) * std::exp(-alpha * t) * tp;
  }
  rhs /= factorial(m - 1);

  return std::abs(lhs - rhs);
}

std::pair<double, double> lemma37_sides(const PrimeTuplePattern& pat) {
  if (pat.m1 < 1 || pat.m2 < 1) throw std::domain_error("m1, m2 must be positive");
  if (pat.primes.size() > 16) throw std::domain_error("prime set too large to enumerate");

  const double lhs = tuple_sum(pat.primes, pat.m1, 0, 0u, 0, 1.0) *
                     tuple_sum(pat.primes, pat.m2, 0, 0u, 0, 1.0);

  double rhs = 0.0;
  const int kmax = std::min(pat.m1, pat.m2);
  for (int k = 0; k <= kmax; ++k) {
    rhs += factorial(k) * binomial(pat.m1, k) * binomial(pat.m2, k) *
           tuple_sum(pat.primes, pat.m1 + pat.m2 - k, k, 0u, 0, 1.0);
  }
  return {lhs, rhs};
}

}  // namespace critline
