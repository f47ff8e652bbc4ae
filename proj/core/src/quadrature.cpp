#include "critline/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace critline {

QuadratureRule gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Root of P_n near cos(pi*(i+3/4)/(n+1/2)), refined by Newton.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pn = 0.0, dpn = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pn = (n >= 1) ? p1 : 1.0;
      dpn = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // One clean recomputation of P_n' at the converged root.
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dpn = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dpn * dpn);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace critline
