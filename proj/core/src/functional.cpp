#include "critline/functional.hpp"

#include <cmath>

namespace critline {

const char* const kKernelVariant = "exp(-a*mu)";

namespace {

int jet_order_for(const Polynomial& shift, const EvalConfig& cfg) {
  int deg = shift.degree();
  if (deg < 0) deg = 0;
  return std::min(deg, cfg.jet_order_cap);
}

void require_valid(const EvalConfig& cfg) {
  if (!(cfg.R > 0.0)) throw std::domain_error("R must be positive");
  if (cfg.quad_order < 16) throw std::domain_error("quad_order must be >= 16");
  if (!(cfg.series_switch > 0.0 && cfg.series_switch <= 1.0))
    throw std::domain_error("series_switch must lie in (0, 1]");
  if (cfg.jet_order_cap < 0) throw std::domain_error("jet_order_cap must be >= 0");
}

}  // namespace

double k_low_t(const ShiftPolynomialSpec& qpoly, const MollifierSet& mol,
               const EvalConfig& cfg, const QuadratureRule& rule) {
  require_valid(cfg);
  const int n = jet_order_for(qpoly.poly, cfg);
  const double base = -cfg.R;
  BiJet a = BiJet::variable_a(base, base, n, n);
  BiJet b = BiJet::variable_b(base, base, n, n);
  BiJet bracket = low_t_bracket(a, b, mol, rule, cfg.series_switch);
  std::vector<double> w = shifted_operator_weights(qpoly.poly, 0.0, -1.0);
  double K = apply_shift_operator(w, w, bracket);
  if (!std::isfinite(K)) throw std::runtime_error("functional evaluated to a non-finite value");
  return K;
}

double k_low_t(const ShiftPolynomialSpec& qpoly, const MollifierSet& mol,
               const EvalConfig& cfg) {
  return k_low_t(qpoly, mol, cfg, gauss_legendre_01(cfg.quad_order));
}

double k_eta(const ShiftPolynomialSpec& ppoly, const MollifierSet& mol,
             const EvalConfig& cfg, const QuadratureRule& rule) {
  require_valid(cfg);
  if (cfg.eta < 0.0) throw std::domain_error("eta must be nonnegative");
  const int n = jet_order_for(ppoly.poly, cfg);
  const double base = -cfg.R / (1.0 + cfg.eta);
  BiJet a = BiJet::variable_a(base, base, n, n);
  BiJet b = BiJet::variable_b(base, base, n, n);

  BiJet m1 = moment_integral(a, b, mol, rule, cfg.series_switch);
  std::vector<double> wp =
      shifted_operator_weights(ppoly.poly, (1.0 + cfg.eta) / 2.0, 1.0);
  const double t1 = apply_shift_operator(wp, wp, m1 / (a + b));

  BiJet m2 = moment_integral(-b, -a, mol, rule, cfg.series_switch);
  std::vector<double> wm =
      shifted_operator_weights(ppoly.poly, (1.0 - cfg.eta) / 2.0, 1.0);
  const double t2 = apply_shift_operator(wm, wm, exp(-a - b) / (a + b) * m2);

  double K = t1 - std::exp(2.0 * cfg.eta * cfg.R / (1.0 + cfg.eta)) * t2;
  if (!std::isfinite(K)) throw std::runtime_error("functional evaluated to a non-finite value");
  return K;
}

double k_eta(const ShiftPolynomialSpec& ppoly, const MollifierSet& mol,
             const EvalConfig& cfg) {
  return k_eta(ppoly, mol, cfg, gauss_legendre_01(cfg.quad_order));
}

double proportion(double K, double R) {
  if (!(R > 0.0)) throw std::domain_error("R must be positive");
  if (!(K > 0.0)) throw std::domain_error("functional not positive — no bound");
  return 1.0 - std::log(K) / R;
}

EtaCoefficients eta_coefficients(double eta) {
  static const Polynomial fit_R({0.7150, 0.632539, -0.142758, 0.0377946,
                                 -0.0062075, 0.000411417});
  static const Polynomial fit_r({0.955682, -0.690002, 0.344604, -0.102225,
                                 0.0158217, -0.000975675});
  static const Polynomial fit_a({-0.144781, 0.889028, -0.410202, 0.0858293,
                                 -0.00602004, -0.00007205});
  static const Polynomial fit_b({2.33768, -1.65646, 0.633289, -0.068012,
                                 -0.0118499, 0.00206328});
  static const Polynomial fit_c({1.80598, -1.62246, 0.854232, -0.267006,
                                 0.0478396, -0.00363412});
  static const Polynomial fit_d({0.0466787, 0.245593, -0.31053, 0.281681,
                                 -0.0946981, 0.00981632});
  static const Polynomial fit_e({-0.322995, 0.280121, 0.452439, -0.390328,
                                 0.103507, -0.00919719});
  EtaCoefficients out{};
  out.R = fit_R(eta);
  out.r = fit_r(eta);
  out.a = fit_a(eta);
  out.b = fit_b(eta);
  out.c = fit_c(eta);
  out.d = fit_d(eta);
  out.e = fit_e(eta);
  return out;
}

Polynomial EtaCoefficients::shift_poly(double eta) const {
  // P(x) = 1 + r*(x - (1+eta)/2); P((1+eta)/2) = 1 holds by construction.
  return Polynomial({1.0 - r * (1.0 + eta) / 2.0, r});
}

MollifierSet EtaCoefficients::mollifier() const {
  MollifierSet mol;
  mol.I = 3;
  mol.pieces = {Polynomial({0.0, a, b, 1.0 - a - b}), Polynomial({0.0, c, d}),
                Polynomial({0.0, e})};
  return mol;
}

EtaEvaluation evaluate_eta_point(double eta, const EvalConfig& cfg) {
  EtaCoefficients fit = eta_coefficients(eta);
  EvalConfig local = cfg;
  local.R = fit.R;
  local.eta = eta;
  ShiftPolynomialSpec sp{fit.shift_poly(eta), ShiftMode::eta};
  EtaEvaluation out;
  out.R = fit.R;
  out.K = k_eta(sp, fit.mollifier(), local);
  if (out.K > 0.0) {
    out.proportion = proportion(out.K, fit.R);
    out.feasible = true;
  }
  return out;
}

double c_of_eta(double eta, const EvalConfig& cfg) {
  EtaEvaluation e = evaluate_eta_point(eta, cfg);
  if (!e.feasible) throw std::domain_error("functional not positive — no bound");
  return e.proportion;
}

std::vector<NamedResidual> check_constraints(const MollifierSet& mol,
                                             const ShiftPolynomialSpec& sp,
                                             double eta) {
  std::vector<NamedResidual> res;
  if (!mol.pieces.empty()) {
    const Polynomial& p1 = mol.pieces.front();
    res.push_back({"p1_at_0", std::abs(p1(0.0))});
    res.push_back({"p1_at_1_minus_1", std::abs(p1(1.0) - 1.0)});
  }
  for (int j = 2; j <= mol.I; ++j)
    res.push_back({"p" + std::to_string(j) + "_at_0", std::abs(mol.piece(j)(0.0))});

  // Q as used by the operator: directly in low_T mode, Q(x) = P(1/2 - x)
  // in eta mode.
  Polynomial q = sp.poly;
  if (sp.mode == ShiftMode::eta) {
    res.push_back(
        {"p_at_center_minus_1", std::abs(sp.poly((1.0 + eta) / 2.0) - 1.0)});
    q = compose_affine(sp.poly, -1.0, 0.5);
  } else {
    res.push_back({"q_at_0_minus_1", std::abs(sp.poly(0.0) - 1.0)});
  }

  // Two symmetry readings are reported side by side: the literal
  // Q'(x) + Q'(1-x) = 0, and Q(x) + Q(1-x) = 2 as forced by Q deriving
  // from an odd-power series. Published optimal choices violate both;
  // these are diagnostics, not gates.
  Polynomial dq = derivative(q);
  double worst_deriv = 0.0, worst_value = 0.0;
  const int grid = 21;
  for (int i = 0; i < grid; ++i) {
    double x = static_cast<double>(i) / (grid - 1);
    worst_deriv = std::max(worst_deriv, std::abs(dq(x) + dq(1.0 - x)));
    worst_value = std::max(worst_value, std::abs(q(x) + q(1.0 - x) - 2.0));
  }
  res.push_back({"q_deriv_symmetry", worst_deriv});
  res.push_back({"q_value_symmetry", worst_value});
  return res;
}

ProportionReport evaluate(const ShiftPolynomialSpec& sp, const MollifierSet& mol,
                          const EvalConfig& cfg) {
  ProportionReport report;
  report.config_echo = cfg;
  report.kernel_variant = kKernelVariant;
  report.K = (sp.mode == ShiftMode::low_T) ? k_low_t(sp, mol, cfg)
                                           : k_eta(sp, mol, cfg);
  report.proportion = proportion(report.K, cfg.R);
  for (const NamedResidual& r : check_constraints(mol, sp, cfg.eta))
    if (r.value > kConstraintTol) report.constraint_violations.push_back(r);
  return report;
}

std::optional<double> c_root(double lo, double hi, double tol,
                             const EvalConfig& cfg) {
  double flo = c_of_eta(lo, cfg);
  double fhi = c_of_eta(hi, cfg);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    double fmid = c_of_eta(mid, cfg);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace critline
