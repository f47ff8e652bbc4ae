#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "critline/bijet.hpp"
#include "critline/polynomial.hpp"
#include "critline/quadrature.hpp"

namespace critline {

// Mollifier data: pieces[j] is P_{j+1}, j = 0..I-1. Nominal side conditions
// P_1(0)=0, P_1(1)=1, P_j(0)=0 (j>=2) are checked by check_constraints but
// never enforced: the published optimal coefficient sets themselves satisfy
// them only to rounding.
struct MollifierSet {
  int I = 1;
  std::vector<Polynomial> pieces;

  const Polynomial& piece(int m) const { return pieces[static_cast<std::size_t>(m - 1)]; }
};

enum class ShiftMode { low_T, eta };

// The polynomial driving the differential operator: Q (applied as Q(-d/da),
// normalized by Q(0)=1) in low_T mode, P (applied as P((1+eta)/2 + d/da),
// normalized by P((1+eta)/2)=1) in eta mode.
struct ShiftPolynomialSpec {
  Polynomial poly;
  ShiftMode mode = ShiftMode::low_T;
};

struct EvalConfig {
  double R = 0.0;
  double eta = 0.0;
  int quad_order = 64;
  double series_switch = 0.5;
  int jet_order_cap = 8;
};

struct NamedResidual {
  std::string name;
  double value = 0.0;
};

struct ProportionReport {
  double K = 0.0;
  double proportion = 0.0;
  std::vector<NamedResidual> constraint_violations;
  EvalConfig config_echo;
  std::string kernel_variant;
};

// Tag recording that the exponential inside the u-kernels integrates the
// inner variable (e^{-a*mu}), the reading consistent with the unscaled
// kernels this functional is a limit of.
extern const char* const kKernelVariant;

// Residuals above this are reported as violations (reporting only; nothing
// is rejected).
inline constexpr double kConstraintTol = 1e-9;

// ---------------------------------------------------------------------------
// Kernels, generic over double and BiJet.

// U_m(a,u): the m-th mollifier kernel. All integral terms are polynomials
// times e^{-a*mu} over [0, 1-u] and evaluate in closed form through
// integrate_poly_exp.
template <class T>
T u_kernel(int m, const T& a, double u, const MollifierSet& mol,
           double series_switch = 0.5) {
  const int I = mol.I;
  if (m < 0 || m > I) throw std::domain_error("u_kernel: m out of range [0, I]");
  const double x = 1.0 - u;
  T res = constant_like(a, 0.0);
  if (m == 0) {
    res = a * mol.piece(1)(x) + constant_like(a, derivative(mol.piece(1))(x));
  } else if (m == 1) {
    // The m=1 kernel has no a*P_1 + P_1' head term; it starts at P_2.
    // Pieces beyond I count as zero, so I=1 one-piece data degrades to
    // the classical single-kernel form.
    if (I >= 2) res = res + (-2.0) * mol.piece(2)(x);
  } else {
    res = a * mol.piece(m)(x) + constant_like(a, derivative(mol.piece(m))(x));
    if (m + 1 <= I) res = res + (-(m + 1.0)) * mol.piece(m + 1)(x);
  }
  for (int l = m + 2; l <= I; ++l) {
    const double sign = ((l - m) % 2 == 0) ? 1.0 : -1.0;
    const double coef = binomial(l, m) * sign / factorial(l - m - 2);
    Polynomial q = times_power(compose_affine(mol.piece(l), -1.0, x), l - m - 2);
    res = res + coef * integrate_poly_exp(q, a, x, series_switch);
  }
  return res;
}

// F(a,b;u) = sum_{m1,m2} c(m1,m2) U_{m1}(a,u) U_{m2}(b,u) u^{m1+m2}/(m1+m2)!
// with c(m1,m2) = sum_k k! C(m1,k) C(m2,k).
template <class T>
T f_kernel(const T& a, const T& b, double u, const MollifierSet& mol,
           double series_switch = 0.5) {
  const int I = mol.I;
  std::vector<T> ua, ub;
  ua.reserve(I + 1);
  ub.reserve(I + 1);
  for (int m = 0; m <= I; ++m) {
    ua.push_back(u_kernel(m, a, u, mol, series_switch));
    ub.push_back(u_kernel(m, b, u, mol, series_switch));
  }
  T total = constant_like(a, 0.0);
  for (int m1 = 0; m1 <= I; ++m1)
    for (int m2 = 0; m2 <= I; ++m2) {
      double cc = 0.0;
      for (int k = 0; k <= std::min(m1, m2); ++k)
        cc += factorial(k) * binomial(m1, k) * binomial(m2, k);
      double upw = 1.0;
      for (int t = 0; t < m1 + m2; ++t) upw *= u;
      total = total + (cc * upw / factorial(m1 + m2)) * (ua[m1] * ub[m2]);
    }
  return total;
}

// int_0^1 F(a,b;u) du by Gauss-Legendre; jets integrate coefficientwise
// through the linear rule.
template <class T>
T moment_integral(const T& a, const T& b, const MollifierSet& mol,
                  const QuadratureRule& rule, double series_switch = 0.5) {
  T total = constant_like(a, 0.0);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    total = total + rule.weights[q] * f_kernel(a, b, rule.nodes[q], mol, series_switch);
  return total;
}

template <class T>
T moment_integral(const T& a, const T& b, const MollifierSet& mol,
                  const EvalConfig& cfg) {
  return moment_integral(a, b, mol, gauss_legendre_01(cfg.quad_order),
                         cfg.series_switch);
}

// The low-T bracket  ( M(a,b) - e^{-a-b} M(-b,-a) ) / (a+b)  to which the
// Q-operators are applied.
template <class T>
T low_t_bracket(const T& a, const T& b, const MollifierSet& mol,
                const QuadratureRule& rule, double series_switch = 0.5) {
  using std::exp;
  T m1 = moment_integral(a, b, mol, rule, series_switch);
  T m2 = moment_integral(-b, -a, mol, rule, series_switch);
  return (m1 - exp(-a - b) * m2) / (a + b);
}

// ---------------------------------------------------------------------------
// Moment functionals and proportion bounds.

// K = Q(-d/da) Q(-d/db) [bracket] at a=b=-R.
double k_low_t(const ShiftPolynomialSpec& qpoly, const MollifierSet& mol,
               const EvalConfig& cfg);
double k_low_t(const ShiftPolynomialSpec& qpoly, const MollifierSet& mol,
               const EvalConfig& cfg, const QuadratureRule& rule);

// K = P(c+d/da) P(c+d/db) [M(a,b)/(a+b)]
//   - e^{2 eta R/(1+eta)} P(c'+d/da) P(c'+d/db) [e^{-a-b} M(-b,-a)/(a+b)]
// at a=b=-R/(1+eta), with c=(1+eta)/2, c'=(1-eta)/2.
double k_eta(const ShiftPolynomialSpec& ppoly, const MollifierSet& mol,
             const EvalConfig& cfg);
double k_eta(const ShiftPolynomialSpec& ppoly, const MollifierSet& mol,
             const EvalConfig& cfg, const QuadratureRule& rule);

// 1 - ln(K)/R; requires K > 0 (otherwise the bound is vacuous).
double proportion(double K, double R);

// The six published degree-5 fits in eta for the optimal parameter set,
// plus the assembled polynomials they define.
struct EtaCoefficients {
  double R, r, a, b, c, d, e;

  Polynomial shift_poly(double eta) const;  // P(x) = 1 + r(x - (1+eta)/2)
  MollifierSet mollifier() const;           // P_1, P_2, P_3 from a..e
};
EtaCoefficients eta_coefficients(double eta);

// Proportion bound C(eta) from the fitted parameter set. R and eta override
// whatever cfg carries; quad_order / series_switch / jet_order_cap apply.
double c_of_eta(double eta, const EvalConfig& cfg);

struct EtaEvaluation {
  double proportion = 0.0;
  double K = 0.0;
  double R = 0.0;
  bool feasible = false;
};
EtaEvaluation evaluate_eta_point(double eta, const EvalConfig& cfg);

// Named constraint residuals (advisory; see MollifierSet). In eta mode the
// symmetry residuals are computed for Q(x) = P(1/2 - x).
std::vector<NamedResidual> check_constraints(const MollifierSet& mol,
                                             const ShiftPolynomialSpec& sp,
                                             double eta);

// Full evaluation: K by mode, proportion, violations, provenance tag.
ProportionReport evaluate(const ShiftPolynomialSpec& sp, const MollifierSet& mol,
                          const EvalConfig& cfg);

// Bisection root of eta -> c_of_eta(eta) in [lo, hi] to absolute tolerance
// tol; nullopt when the bracket does not change sign.
std::optional<double> c_root(double lo, double hi, double tol,
                             const EvalConfig& cfg);

}  // namespace critline
