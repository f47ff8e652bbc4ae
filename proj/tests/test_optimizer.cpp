#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "critline/optimizer.hpp"
#include "critline/presets.hpp"
#include "oracles.hpp"

using namespace critline;

TEST_CASE("decode lays parameters out as documented (power basis)") {
  SearchSpace s = theorem1_simple_space();
  REQUIRE(s.dimension() == 7);
  const std::vector<double> x = {0.7, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  DecodedCandidate c = decode(x, s);
  CHECK(c.R == 0.7);
  REQUIRE(c.mollifier.I == 3);
  CHECK(c.mollifier.pieces[0].coeffs == std::vector<double>{0.0, 0.1, 0.2, 0.7});
  CHECK(c.mollifier.pieces[1].coeffs == std::vector<double>{0.0, 0.3, 0.4});
  CHECK(c.mollifier.pieces[2].coeffs == std::vector<double>{0.0, 0.5});
  CHECK(c.shift.poly.coeffs == std::vector<double>{1.0, 0.6});
  CHECK(c.shift.mode == ShiftMode::low_T);
}

TEST_CASE("decoded candidates satisfy the pinned constraints exactly") {
  oracles::Uniform rng(7);
  SearchSpace spaces[] = {theorem1_simple_space(), theorem1_critical_space()};
  for (const SearchSpace& s : spaces)
    for (int t = 0; t < 25; ++t) {
      std::vector<double> x(s.dimension());
      for (int i = 0; i < s.dimension(); ++i) x[i] = rng(s.lower[i], s.upper[i]);
      DecodedCandidate c = decode(x, s);
      for (const NamedResidual& r : check_constraints(c.mollifier, c.shift, s.eta)) {
        if (r.name == "q_deriv_symmetry" || r.name == "q_value_symmetry")
          continue;  // soft symmetry is not pinned by the encoding
        CHECK(r.value <= 1e-12);
      }
    }
}

TEST_CASE("bump basis pins the endpoint value structurally") {
  SearchSpace s = theorem1_critical_space();
  std::vector<double> x(s.dimension(), 0.37);
  x[0] = 0.8;
  DecodedCandidate c = decode(x, s);
  CHECK(c.mollifier.pieces[0](1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.mollifier.pieces[0](0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("eta-mode decode normalizes the shift at the center point") {
  SearchSpace s = eta_space(0.5);
  std::vector<double> x(s.dimension(), 0.21);
  x[0] = 0.9;
  DecodedCandidate c = decode(x, s);
  CHECK(c.shift.mode == ShiftMode::eta);
  CHECK(c.shift.poly((1.0 + 0.5) / 2.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("decode rejects mis-sized parameter vectors") {
  SearchSpace s = theorem1_simple_space();
  CHECK_THROWS_AS(decode(std::vector<double>(3, 0.0), s), std::invalid_argument);
}

TEST_CASE("objective returns the sentinel for unusable points") {
  SearchSpace s = theorem1_simple_space();
  EvalConfig cfg;
  std::vector<double> x = theorem1_simple_start();
  x[0] = -0.5;  // R must be positive
  CHECK(objective(x, s, cfg) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("objective at the published start matches the published bound") {
  SearchSpace s = theorem1_simple_space();
  EvalConfig cfg = presets::theorem1_simple().config;
  const double v = objective(theorem1_simple_start(), s, cfg);
  CHECK(std::abs(v - 0.6044) <= 5e-4);

  SearchSpace sc = theorem1_critical_space();
  EvalConfig cfgc = presets::theorem1_critical().config;
  const double vc = objective(theorem1_critical_start(), sc, cfgc);
  CHECK(std::abs(vc - 0.6107) <= 5e-4);
}

TEST_CASE("a one-piece mollifier stays strictly below the three-piece bound") {
  // P_1 = x with a linear shift polynomial is the classical single-kernel
  // setup; no (R, q1) choice should reach the three-piece value.
  SearchSpace s = theorem1_simple_space();
  EvalConfig cfg;
  double best = -std::numeric_limits<double>::infinity();
  for (double R = 0.4; R <= 1.3; R += 0.15)
    for (double q1 = -1.6; q1 <= -0.2; q1 += 0.2) {
      const std::vector<double> x = {R, 1.0, 0.0, 0.0, 0.0, 0.0, q1};
      DecodedCandidate c = decode(x, s);
      CHECK(c.mollifier.pieces[0].coeffs == std::vector<double>{0.0, 1.0, 0.0, 0.0});
      CHECK(c.mollifier.pieces[1].is_zero());
      CHECK(c.mollifier.pieces[2].is_zero());
      best = std::max(best, objective(x, s, cfg));
    }
  CHECK(best > 0.5);  // the sweep does find the classical regime
  CHECK(best < 0.6044);
}

TEST_CASE("optimization is reproducible for a fixed seed") {
  SearchSpace s = theorem1_simple_space();
  EvalConfig cfg;
  OptimResult r1 = optimize(s, cfg, 400, 42, std::nullopt, 1);
  OptimResult r2 = optimize(s, cfg, 400, 42, std::nullopt, 4);
  CHECK(r1.best_proportion == r2.best_proportion);
  CHECK(r1.best_raw == r2.best_raw);
  CHECK(r1.evaluations == r2.evaluations);
  REQUIRE(r1.trace.size() == r2.trace.size());
  for (std::size_t i = 0; i < r1.trace.size(); ++i) {
    CHECK(r1.trace[i].iteration == r2.trace[i].iteration);
    CHECK(r1.trace[i].value == r2.trace[i].value);
  }
  OptimResult r3 = optimize(s, cfg, 400, 43, std::nullopt, 1);
  CHECK(r3.best_raw != r1.best_raw);  // a different seed explores differently
}

TEST_CASE("trace is strictly improving and within budget") {
  SearchSpace s = theorem1_simple_space();
  EvalConfig cfg;
  OptimResult r = optimize(s, cfg, 600, 7, theorem1_simple_start(), 1);
  CHECK(r.evaluations <= 600);
  REQUIRE(!r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].value > r.trace[i - 1].value);
    CHECK(r.trace[i].iteration > r.trace[i - 1].iteration);
  }
  CHECK(r.trace.back().value == r.best_proportion);
}

TEST_CASE("a budget too small for a simplex returns the start point") {
  SearchSpace s = theorem1_simple_space();
  EvalConfig cfg;
  const std::vector<double> start = theorem1_simple_start();
  OptimResult r = optimize(s, cfg, 5, 1, start, 1);
  CHECK(r.evaluations == 1);
  CHECK(r.best_raw == start);
  CHECK(std::abs(r.best_proportion - 0.6044) <= 5e-4);
}

TEST_CASE("warm-started search never falls below its start") {
  SearchSpace s = theorem1_simple_space();
  EvalConfig cfg;
  const std::vector<double> start = theorem1_simple_start();
  const double v0 = objective(start, s, cfg);
  OptimResult r = optimize(s, cfg, 800, 3, start, 1);
  CHECK(r.best_proportion >= v0 - 1e-12);
}

TEST_CASE("mis-sized bounds are rejected") {
  SearchSpace s = theorem1_simple_space();
  s.lower.pop_back();
  EvalConfig cfg;
  CHECK_THROWS_AS(optimize(s, cfg, 500, 1, std::nullopt, 1), std::invalid_argument);
}
