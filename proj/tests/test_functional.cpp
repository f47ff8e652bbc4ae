#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "critline/functional.hpp"
#include "critline/presets.hpp"
#include "oracles.hpp"

using namespace critline;

namespace {

MollifierSet one_piece_linear() { return MollifierSet{1, {Polynomial({0.0, 1.0})}}; }

MollifierSet random_mollifier(oracles::Uniform& u) {
  MollifierSet mol;
  mol.I = 3;
  mol.pieces = {Polynomial({0.0, u(-1.0, 1.5), u(-1.0, 1.0), u(-1.0, 1.0)}),
                Polynomial({0.0, u(-1.0, 2.0), u(-1.0, 1.0)}),
                Polynomial({0.0, u(-0.5, 0.5)})};
  return mol;
}

}  // namespace

TEST_CASE("u_kernel head terms evaluate the published closed forms") {
  const MollifierSet& mol = presets::theorem1_simple().mollifier;

  // Top kernel at u=0 (x=1): a*P_3(1) + P_3'(1) with P_3(x) = -0.332995 x.
  const double got = u_kernel(3, -0.715, 0.0, mol);
  CHECK(got == doctest::Approx(-0.715 * -0.332995 + -0.332995).epsilon(1e-15));
  CHECK(got == doctest::Approx(-0.094903575).epsilon(1e-12));

  // At u=1 the integration interval is empty and only P'(0) survives its
  // piece; for m=0 that is the x-coefficient of P_1.
  CHECK(u_kernel(0, 2.31, 1.0, mol) ==
        doctest::Approx(mol.pieces[0].coeffs[1]).epsilon(1e-14));
  // m=1 at u=1: -2 P_2(0) = 0.
  CHECK(u_kernel(1, 2.31, 1.0, mol) == doctest::Approx(0.0));
}

TEST_CASE("u_kernel at u=1 keeps only the endpoint head terms") {
  // The integration interval [0, 1-u] is empty, so a mid-range kernel
  // collapses to a*P_m(0) + P_m'(0) - (m+1) P_{m+1}(0).
  MollifierSet mol{4,
                   {Polynomial({0.3, 1.0, -0.5}), Polynomial({-0.2, 0.7}),
                    Polynomial({0.1, -0.4, 0.2}), Polynomial({0.05, 0.6})}};
  const double a = -1.37;
  const double want = a * -0.2 + 0.7 - 3.0 * 0.1;
  CHECK(u_kernel(2, a, 1.0, mol) == doctest::Approx(want).epsilon(1e-14));

  // With vanishing constant terms only the slope at 0 survives.
  MollifierSet zeroed{4,
                      {Polynomial({0.0, 1.0, -0.5}), Polynomial({0.0, 0.7}),
                       Polynomial({0.0, -0.4, 0.2}), Polynomial({0.0, 0.6})}};
  CHECK(u_kernel(2, a, 1.0, zeroed) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("u_kernel rejects out-of-range kernel index") {
  MollifierSet mol = one_piece_linear();
  CHECK_THROWS_AS(u_kernel(2, 1.0, 0.5, mol), std::domain_error);
  CHECK_THROWS_AS(u_kernel(-1, 1.0, 0.5, mol), std::domain_error);
}

TEST_CASE("single-piece kernels reduce to the classical pair") {
  // With one linear piece P_1 = x: U_0(a,u) = a(1-u) + 1 and U_1 = 0.
  MollifierSet mol = one_piece_linear();
  for (double a : {-0.7, 0.0, 1.3})
    for (double u : {0.0, 0.4, 1.0}) {
      CHECK(u_kernel(0, a, u, mol) == doctest::Approx(a * (1.0 - u) + 1.0));
      CHECK(u_kernel(1, a, u, mol) == doctest::Approx(0.0));
    }
}

TEST_CASE("padding a mollifier with zero pieces changes nothing") {
  MollifierSet one = one_piece_linear();
  MollifierSet padded{3,
                      {Polynomial({0.0, 1.0}), Polynomial({0.0, 0.0}),
                       Polynomial({0.0, 0.0})}};
  oracles::Uniform rng(11);
  for (int t = 0; t < 50; ++t) {
    const double a = rng(-2.0, 2.0);
    const double b = rng(-2.0, 2.0);
    const double u = rng(0.0, 1.0);
    for (int m = 0; m <= 1; ++m)
      CHECK(u_kernel(m, a, u, one) ==
            doctest::Approx(u_kernel(m, a, u, padded)).epsilon(1e-14));
    for (int m = 2; m <= 3; ++m)
      CHECK(u_kernel(m, a, u, padded) == doctest::Approx(0.0));
    CHECK(f_kernel(a, b, u, one) ==
          doctest::Approx(f_kernel(a, b, u, padded)).epsilon(1e-13));
  }
}

TEST_CASE("single-piece second moment has the quadratic closed form") {
  // int_0^1 (a(1-u)+1)(b(1-u)+1) du = ab/3 + (a+b)/2 + 1.
  MollifierSet mol = one_piece_linear();
  EvalConfig cfg;
  oracles::Uniform rng(5);
  for (int t = 0; t < 100; ++t) {
    const double a = rng(-3.0, 3.0);
    const double b = rng(-3.0, 3.0);
    const double want = a * b / 3.0 + (a + b) / 2.0 + 1.0;
    CHECK(std::abs(moment_integral(a, b, mol, cfg) - want) <= 1e-12);
  }
  CHECK(moment_integral(0.0, 0.0, mol, cfg) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("f_kernel is symmetric in its two arguments") {
  oracles::Uniform rng(29);
  MollifierSet mol = random_mollifier(rng);
  for (int t = 0; t < 1000; ++t) {
    const double a = rng(-2.5, 2.5);
    const double b = rng(-2.5, 2.5);
    const double u = rng(0.0, 1.0);
    const double fab = f_kernel(a, b, u, mol);
    const double fba = f_kernel(b, a, u, mol);
    const double scale = std::max({std::abs(fab), std::abs(fba), 1.0});
    CHECK(std::abs(fab - fba) / scale <= 1e-12);
  }
}

TEST_CASE("f_kernel for one piece factorizes into the two kernels") {
  MollifierSet mol = one_piece_linear();
  oracles::Uniform rng(3);
  for (int t = 0; t < 50; ++t) {
    const double a = rng(-2.0, 2.0);
    const double b = rng(-2.0, 2.0);
    const double u = rng(0.0, 1.0);
    const double want = u_kernel(0, a, u, mol) * u_kernel(0, b, u, mol);
    CHECK(f_kernel(a, b, u, mol) == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("f_kernel vanishes when every piece is zero") {
  MollifierSet mol{3, {Polynomial({0.0}), Polynomial({0.0}), Polynomial({0.0})}};
  for (double a : {-1.2, 0.0, 0.9})
    for (double u : {0.0, 0.5, 1.0}) CHECK(f_kernel(a, 0.4, u, mol) == 0.0);
}

TEST_CASE("f_kernel against direct numerical integration of the moment") {
  // Independent check of moment_integral: adaptive Simpson over the same
  // scalar kernel.
  const presets::Preset& preset = presets::theorem1_simple();
  const double a = -0.715, b = -0.31;
  const double got = moment_integral(a, b, preset.mollifier, preset.config);
  const double want = oracles::integrate(
      [&](double u) { return f_kernel(a, b, u, preset.mollifier); }, 0.0, 1.0,
      1e-14);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("quadrature order 64 is already converged") {
  const presets::Preset& preset = presets::theorem1_simple();
  EvalConfig c64 = preset.config;
  c64.quad_order = 64;
  EvalConfig c128 = preset.config;
  c128.quad_order = 128;
  const double m64 = moment_integral(-0.715, -0.715, preset.mollifier, c64);
  const double m128 = moment_integral(-0.715, -0.715, preset.mollifier, c128);
  CHECK(std::abs(m64 - m128) <= 1e-12 * std::abs(m128));

  const double k64 = k_low_t(preset.shift, preset.mollifier, c64);
  const double k128 = k_low_t(preset.shift, preset.mollifier, c128);
  CHECK(std::abs(k64 - k128) <= 1e-12 * std::abs(k128));
}

TEST_CASE("constant shift polynomial reduces K to the bare bracket") {
  // With Q = q0 the operator is multiplication by q0, so
  // K = q0^2 (M(-R,-R) - e^{2R} M(R,R)) / (-2R).
  oracles::Uniform rng(17);
  MollifierSet mol = random_mollifier(rng);
  EvalConfig cfg;
  cfg.R = 0.6;
  const double q0 = 1.0;  // normalization pins Q(0)=1
  ShiftPolynomialSpec sp{Polynomial({q0}), ShiftMode::low_T};
  const double m1 = moment_integral(-0.6, -0.6, mol, cfg);
  const double m2 = moment_integral(0.6, 0.6, mol, cfg);
  const double want = q0 * q0 * (m1 - std::exp(1.2) * m2) / -1.2;
  CHECK(k_low_t(sp, mol, cfg) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("K is a quadratic form in the shift polynomial") {
  const presets::Preset& preset = presets::theorem1_simple();
  ShiftPolynomialSpec doubled = preset.shift;
  for (double& c : doubled.poly.coeffs) c *= 2.0;
  const double k1 = k_low_t(preset.shift, preset.mollifier, preset.config);
  const double k4 = k_low_t(doubled, preset.mollifier, preset.config);
  CHECK(k4 == doctest::Approx(4.0 * k1).epsilon(1e-14));
}

TEST_CASE("K is invariant under negating the whole mollifier") {
  const presets::Preset& preset = presets::theorem1_simple();
  MollifierSet negated = preset.mollifier;
  for (Polynomial& p : negated.pieces)
    for (double& c : p.coeffs) c = -c;
  const double k1 = k_low_t(preset.shift, preset.mollifier, preset.config);
  const double k2 = k_low_t(preset.shift, negated, preset.config);
  CHECK(std::abs(k1 - k2) <= 1e-12 * std::abs(k1));
}

TEST_CASE("jet derivatives of the low-T bracket match finite differences") {
  const presets::Preset& preset = presets::theorem1_simple();
  const QuadratureRule rule = gauss_legendre_01(preset.config.quad_order);
  const double R = preset.config.R;
  BiJet a = BiJet::variable_a(-R, -R, 2, 2);
  BiJet b = BiJet::variable_b(-R, -R, 2, 2);
  BiJet g = low_t_bracket(a, b, preset.mollifier, rule, preset.config.series_switch);
  auto scalar = [&](double aa, double bb) {
    return low_t_bracket(aa, bb, preset.mollifier, rule, preset.config.series_switch);
  };
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= 2; ++j) {
      const double want = oracles::mixed_partial(scalar, -R, -R, i, j, 2e-2);
      const double got = g.mixed_partial(i, j);
      const double scale = std::max(std::abs(want), 1.0);
      CHECK(std::abs(got - want) / scale <= 1e-6);
    }
}

TEST_CASE("mirrored-moment argument order does not change K") {
  // The second moment enters the bracket as M(-b,-a); since F is symmetric
  // in its arguments, swapping to M(-a,-b) must reproduce k_low_t exactly
  // (symmetric base point, identical operator weights on both variables).
  const presets::Preset& preset = presets::theorem1_simple();
  const MollifierSet& mol = preset.mollifier;
  const EvalConfig& cfg = preset.config;
  const QuadratureRule rule = gauss_legendre_01(cfg.quad_order);
  const double R = cfg.R;
  const int d = preset.shift.poly.degree();
  BiJet a = BiJet::variable_a(-R, -R, d, d);
  BiJet b = BiJet::variable_b(-R, -R, d, d);
  using std::exp;
  BiJet m1 = moment_integral(a, b, mol, rule, cfg.series_switch);
  BiJet m2 = moment_integral(-a, -b, mol, rule, cfg.series_switch);
  BiJet bracket = (m1 - exp(-a - b) * m2) / (a + b);
  const std::vector<double> w =
      shifted_operator_weights(preset.shift.poly, 0.0, -1.0);
  const double swapped = apply_shift_operator(w, w, bracket);
  CHECK(swapped ==
        doctest::Approx(k_low_t(preset.shift, mol, cfg)).epsilon(1e-12));
}

TEST_CASE("eta mode at eta=0 coincides with the low-T functional") {
  oracles::Uniform rng(23);
  for (int t = 0; t < 20; ++t) {
    MollifierSet mol = random_mollifier(rng);
    Polynomial q({1.0, rng(-2.0, 2.0), rng(-1.0, 1.0), rng(-1.0, 1.0)});
    EvalConfig cfg;
    cfg.R = rng(0.4, 1.2);
    ShiftPolynomialSpec low{q, ShiftMode::low_T};
    // P(x) = Q(1/2 - x) turns Q(-d) into P(1/2 + d).
    ShiftPolynomialSpec eta{compose_affine(q, -1.0, 0.5), ShiftMode::eta};
    const double k1 = k_low_t(low, mol, cfg);
    const double k2 = k_eta(eta, mol, cfg);
    const double scale = std::max({std::abs(k1), std::abs(k2), 1e-30});
    CHECK(std::abs(k1 - k2) / scale <= 1e-9);
  }
}

TEST_CASE("proportion maps K through 1 - ln(K)/R") {
  CHECK(proportion(1.0, 0.7) == doctest::Approx(1.0));
  CHECK(proportion(std::exp(0.7), 0.7) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(proportion(0.0, 0.7),
                       "functional not positive — no bound", std::domain_error);
  CHECK_THROWS_AS(proportion(-2.0, 0.7), std::domain_error);
}

TEST_CASE("config validation rejects unusable parameters") {
  const presets::Preset& preset = presets::theorem1_simple();
  EvalConfig bad = preset.config;
  bad.R = 0.0;
  CHECK_THROWS_AS(k_low_t(preset.shift, preset.mollifier, bad), std::domain_error);
  bad = preset.config;
  bad.quad_order = 8;
  CHECK_THROWS_AS(k_low_t(preset.shift, preset.mollifier, bad), std::domain_error);
  bad = preset.config;
  bad.series_switch = 0.0;
  CHECK_THROWS_AS(k_low_t(preset.shift, preset.mollifier, bad), std::domain_error);
}

TEST_CASE("check_constraints names every residual") {
  const presets::Preset& preset = presets::theorem1_simple();
  auto residuals = check_constraints(preset.mollifier, preset.shift, 0.0);
  double p1_at_0 = -1, q_at_0 = -1, q_deriv = -1, q_value = -1, p1_at_1 = -1;
  for (const NamedResidual& r : residuals) {
    if (r.name == "p1_at_0") p1_at_0 = r.value;
    if (r.name == "p1_at_1_minus_1") p1_at_1 = r.value;
    if (r.name == "q_at_0_minus_1") q_at_0 = r.value;
    if (r.name == "q_deriv_symmetry") q_deriv = r.value;
    if (r.name == "q_value_symmetry") q_value = r.value;
  }
  CHECK(p1_at_0 == 0.0);
  CHECK(q_at_0 == 0.0);
  // Published rounded coefficients miss P_1(1)=1 by about 1e-6.
  CHECK(p1_at_1 == doctest::Approx(1e-6).epsilon(0.2));
  // The optimal Q is deliberately asymmetric; the residual reports it.
  CHECK(q_deriv == doctest::Approx(2.0 * 0.955682).epsilon(1e-9));
  CHECK(q_value == doctest::Approx(0.955682).epsilon(1e-9));
}

TEST_CASE("evaluate assembles the report and filters violations") {
  const presets::Preset& preset = presets::theorem1_simple();
  ProportionReport rep = evaluate(preset.shift, preset.mollifier, preset.config);
  CHECK(rep.K > 0.0);
  CHECK(rep.proportion == doctest::Approx(1.0 - std::log(rep.K) / preset.config.R));
  CHECK(rep.kernel_variant == std::string("exp(-a*mu)"));
  CHECK(rep.config_echo.R == preset.config.R);
  for (const NamedResidual& v : rep.constraint_violations)
    CHECK(v.value > kConstraintTol);
  // The asymmetric Q must show up among the violations.
  bool found = false;
  for (const NamedResidual& v : rep.constraint_violations)
    if (v.name == "q_deriv_symmetry") found = true;
  CHECK(found);
}

TEST_CASE("fitted parameter constants at eta=0 and the assembled forms") {
  EtaCoefficients c0 = eta_coefficients(0.0);
  CHECK(c0.R == 0.7150);
  CHECK(c0.r == 0.955682);
  CHECK(c0.a == -0.144781);
  CHECK(c0.b == 2.33768);
  CHECK(c0.c == 1.80598);
  CHECK(c0.d == 0.0466787);
  CHECK(c0.e == -0.322995);
  // P_1's cubic coefficient is pinned by P_1(1)=1: 1 - a - b.
  MollifierSet mol = c0.mollifier();
  REQUIRE(mol.I == 3);
  REQUIRE(mol.pieces[0].coeffs.size() == 4);
  CHECK(mol.pieces[0].coeffs[3] ==
        doctest::Approx(1.0 - c0.a - c0.b).epsilon(1e-15));
  CHECK(std::abs(mol.pieces[0].coeffs[3] - -1.1929) <= 1e-4);
  // The shift polynomial is normalized at the operator center.
  CHECK(c0.shift_poly(0.0)(0.5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fitted parameter curve reproduces the published values") {
  EvalConfig cfg;
  CHECK(c_of_eta(0.0, cfg) == doctest::Approx(0.6044).epsilon(2e-3));
  CHECK(std::abs(c_of_eta(0.25, cfg) - 0.5261) <= 2e-3);
  CHECK(std::abs(c_of_eta(3.0, cfg) - 0.1266) <= 2e-3);
  EtaEvaluation e5 = evaluate_eta_point(5.0, cfg);
  CHECK(e5.feasible);
  CHECK(e5.proportion == doctest::Approx(0.0048).epsilon(0.5));
}

TEST_CASE("root finder brackets the sign change of the fitted curve") {
  EvalConfig cfg;
  auto root = c_root(4.5, 5.5, 1e-3, cfg);
  REQUIRE(root.has_value());
  CHECK(*root == doctest::Approx(5.074).epsilon(0.01));
  // A bracket with no sign change reports none.
  CHECK_FALSE(c_root(0.0, 1.0, 1e-3, cfg).has_value());
}
