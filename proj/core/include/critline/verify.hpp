#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "critline/polynomial.hpp"

namespace critline {

// Inputs for the prime-tuple product identity: the distinct prime divisors
// of a square-free integer, and the two tuple lengths whose log-sums are
// multiplied.
struct PrimeTuplePattern {
  std::vector<std::uint64_t> primes;
  int m1 = 1;
  int m2 = 1;
};

// |LHS - RHS| of the nested-integral collapse
//   int_1^D dx_1/x_1^{1+alpha} ... int_1^{D/(x_1..x_{m-1})} f(x_1..x_m)/x_m^{1+alpha} dx_m
//     = int_1^D f(x) log^{m-1}(x) / ((m-1)! x^{1+alpha}) dx,
// both sides by Gauss-Legendre after the substitution x_i = e^{t_i}.
double lemma36_residual(int m, const Polynomial& f, double D, double alpha,
                        int quad_order);

// Both sides of the prime-tuple identity
//   (sum over ordered m1-tuples of distinct primes of prod log p_i)
//   * (same with m2)
//   = sum_k k! C(m1,k) C(m2,k) * sum over ordered (m1+m2-k)-tuples with the
//     first k log-factors squared.
// Sums are exact enumerations; the caller compares the two totals.
std::pair<double, double> lemma37_sides(const PrimeTuplePattern& pat);

}  // namespace critline
