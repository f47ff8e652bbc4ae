#pragma once

#include <vector>

namespace critline {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule mapped to [0,1]. Exact for polynomials of degree
// 2n-1; the kernels integrated here are entire in u, so a fixed order is
// both deterministic and effectively exact.
QuadratureRule gauss_legendre_01(int n);

}  // namespace critline
