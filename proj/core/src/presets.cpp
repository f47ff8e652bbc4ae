#include "critline/presets.hpp"

#include <cmath>
#include <sstream>

namespace critline {
namespace presets {

namespace {

Polynomial bump(int k) {
  // x * (1-x)^k
  Polynomial r({0.0, 1.0});
  Polynomial omx({1.0, -1.0});
  for (int i = 0; i < k; ++i) r = r * omx;
  return r;
}

double achieved(const Preset& p) {
  return proportion(k_low_t(p.shift, p.mollifier, p.config), p.config.R);
}

Preset make_simple() {
  Preset p;
  p.name = "simple";
  p.target = 0.6044;
  p.config.R = 0.7150;
  p.mollifier.I = 3;
  p.mollifier.pieces = {Polynomial({0.0, -0.144781, 2.33768, -1.1929}),
                        Polynomial({0.0, 1.80598, 0.0466787}),
                        Polynomial()};  // P_3 adjudicated below
  p.shift = {Polynomial({1.0, -0.955682}), ShiftMode::low_T};

  // The source lists the P_3 slope as -0.332995 in the coefficient display
  // but as -0.322995 in the constant term of its eta-fit for the same
  // quantity. Evaluate both, keep whichever lands closer to the stated
  // 0.6044 bound, and record the margins.
  const double cand[2] = {-0.332995, -0.322995};
  double prop[2];
  for (int i = 0; i < 2; ++i) {
    p.mollifier.pieces[2] = Polynomial({0.0, cand[i]});
    prop[i] = achieved(p);
  }
  const int pick = (std::abs(prop[0] - p.target) <= std::abs(prop[1] - p.target)) ? 0 : 1;
  p.mollifier.pieces[2] = Polynomial({0.0, cand[pick]});
  std::ostringstream note;
  note.precision(9);
  note << "P_3 slope ambiguous between -0.332995 (coefficient display) and "
          "-0.322995 (eta-fit constant term); adopted " << cand[pick]
       << " giving " << prop[pick] << " vs " << prop[1 - pick]
       << " for the alternative, target " << p.target << ".";
  p.resolution = note.str();
  return p;
}

Preset make_critical() {
  Preset p;
  p.name = "critical";
  p.target = 0.6107;
  p.config.R = 0.7721;
  p.mollifier.I = 3;
  p.mollifier.pieces = {
      Polynomial({0.0, 1.0}) + 0.1560 * bump(1) + (-1.4045) * bump(2) +
          (-0.0662) * bump(3),
      Polynomial({0.0, 2.0409, 0.2661}), Polynomial({0.0, -0.0734})};
  p.shift.mode = ShiftMode::low_T;

  // Q is displayed as 1 - 0.7721x - 0.1901(x^2/2 - x^3/3)
  // - 3.9627(x^3/3 - x^4/4 + x^5/5). Read verbatim this does not evaluate
  // to anything near its stated bound (K ~ 8.44, bound ~ -1.76), so the
  // display is corrupted. The grouped terms are antiderivatives of bump
  // polynomials — int x(1-x) and int x^2(1-x)^2 — except the printed
  // quartic denominator (x^4/4 instead of the x^4/2 the second bump
  // requires). With that basis fixed and the leading -Rx kept, maximizing
  // K over the two bump multipliers at R = 0.7721 lands on 0.66295 /
  // 2.25253 and reproduces the stated 0.6107; the displayed 0.1901 /
  // 3.9627 do not, under any single-digit repair. The reconstruction is
  // adopted; both readings and bounds are recorded here.
  Polynomial g2 = antiderivative(bump(1));                    // x^2/2 - x^3/3
  Polynomial g3 = antiderivative(bump(2) * Polynomial({0.0, 1.0}));  // x^3/3 - x^4/2 + x^5/5
  const double c2 = 0.6629462168, c3 = 2.2525284737;
  Polynomial q_reconstructed =
      Polynomial({1.0, -0.7721}) + (-c2) * g2 + (-c3) * g3;
  Polynomial g3_printed({0.0, 0.0, 0.0, 1.0 / 3.0, -0.25, 0.2});
  Polynomial q_printed =
      Polynomial({1.0, -0.7721}) + (-0.1901) * g2 + (-3.9627) * g3_printed;

  p.shift.poly = q_printed;
  const double k_printed = k_low_t(p.shift, p.mollifier, p.config);
  const double prop_printed = 1.0 - std::log(k_printed) / p.config.R;
  p.shift.poly = q_reconstructed;
  const double prop_rec = achieved(p);
  if (std::abs(prop_printed - p.target) < std::abs(prop_rec - p.target))
    p.shift.poly = q_printed;

  std::ostringstream note;
  note.precision(9);
  note << "displayed Q evaluates to " << prop_printed
       << " (K=" << k_printed << "), inconsistent with the stated " << p.target
       << "; adopted in-family reconstruction with bump multipliers " << c2
       << " / " << c3 << " and quartic term x^4/2, giving " << prop_rec << ".";
  p.resolution = note.str();
  return p;
}

}  // namespace

const Preset& theorem1_simple() {
  static const Preset p = make_simple();
  return p;
}

const Preset& theorem1_critical() {
  static const Preset p = make_critical();
  return p;
}

}  // namespace presets
}  // namespace critline
