#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "critline/functional.hpp"

namespace critline {

enum class P1Basis {
  power,             // P_1 = c_1 x + ... + c_{d-1} x^{d-1} + (1 - sum c_k) x^d
  one_minus_x_bumps  // P_1 = x + s_1 x(1-x) + s_2 x(1-x)^2 + ...
};

// Declarative description of the free parameter vector. Layout:
//   [ R,
//     P_1 free coefficients (d_1 - 1 of them; see P1Basis),
//     P_j coefficients of x^1..x^{d_j} for j = 2..I,
//     shift polynomial coefficients of x^1..x^{d_s} ]
// Constant terms and P_1's pinned coefficient are eliminated so every
// decoded candidate satisfies P_1(0)=0, P_1(1)=1, P_j(0)=0 and the shift
// normalization (Q(0)=1, or P((1+eta)/2)=1 in eta mode) exactly.
struct SearchSpace {
  double eta = 0.0;
  ShiftMode mode = ShiftMode::low_T;
  std::vector<int> piece_degrees;  // degrees of P_1..P_I, each >= 1
  int shift_degree = 1;
  P1Basis p1_basis = P1Basis::power;
  std::vector<double> lower;  // per-coordinate; sized dimension()
  std::vector<double> upper;

  int dimension() const;
};

struct DecodedCandidate {
  double R = 0.0;
  MollifierSet mollifier;
  ShiftPolynomialSpec shift;
};

DecodedCandidate decode(const std::vector<double>& params, const SearchSpace& space);

// Proportion bound at the decoded candidate; -inf when the functional is
// nonpositive or otherwise unusable (the sentinel keeps the search total).
double objective(const std::vector<double>& params, const SearchSpace& space,
                 const EvalConfig& cfg);

struct TracePoint {
  std::int64_t iteration = 0;
  double value = 0.0;
};

struct OptimResult {
  DecodedCandidate best_params;
  std::vector<double> best_raw;
  double best_proportion = 0.0;
  std::int64_t evaluations = 0;
  std::vector<TracePoint> trace;  // improvements only; values non-decreasing
};

// Nelder-Mead with deterministic multi-start. Restart trajectories depend
// only on (seed, restart index), so the result is reproducible bit-for-bit
// under any thread count; ties in the final reduction go to the lowest
// restart index. A warm start seeds restart 0 in place of a random point.
// Budgets too small to hold a simplex return the (re-evaluated) start.
OptimResult optimize(const SearchSpace& space, const EvalConfig& cfg,
                     std::int64_t budget, std::uint64_t seed,
                     const std::optional<std::vector<double>>& warm_start = std::nullopt,
                     int threads = 1);

// Ready-made spaces and their published warm starts.
SearchSpace theorem1_simple_space();
std::vector<double> theorem1_simple_start();
SearchSpace theorem1_critical_space();
std::vector<double> theorem1_critical_start();
SearchSpace eta_space(double eta);

}  // namespace critline
