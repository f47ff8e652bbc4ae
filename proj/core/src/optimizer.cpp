#include "critline/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "critline/presets.hpp"

namespace critline {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double objective_impl(const std::vector<double>& params, const SearchSpace& space,
                      const EvalConfig& cfg, const QuadratureRule& rule) {
  DecodedCandidate cand;
  try {
    cand = decode(params, space);
  } catch (const std::exception&) {
    return kNegInf;
  }
  if (!(cand.R > 0.0)) return kNegInf;
  EvalConfig local = cfg;
  local.R = cand.R;
  local.eta = space.eta;
  try {
    const double K = (space.mode == ShiftMode::low_T)
                         ? k_low_t(cand.shift, cand.mollifier, local, rule)
                         : k_eta(cand.shift, cand.mollifier, local, rule);
    if (!(K > 0.0)) return kNegInf;
    return proportion(K, cand.R);
  } catch (const std::exception&) {
    return kNegInf;
  }
}

struct RestartOutcome {
  std::vector<double> best;
  double value = kNegInf;
  std::vector<TracePoint> trace;  // local evaluation indices
  std::int64_t evals = 0;
};

// Platform-independent uniform in [lo, hi): the standard distributions are
// implementation-defined, which would break bit-for-bit reproducibility.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

class NelderMead {
 public:
  NelderMead(const SearchSpace& space, const EvalConfig& cfg,
             const QuadratureRule& rule, std::int64_t budget)
      : space_(space), cfg_(cfg), rule_(rule), budget_(budget) {}

  RestartOutcome run(std::vector<double> x0) {
    const int n = space_.dimension();
    clamp(x0);
    simplex_.clear();
    if (!try_add(x0)) return finish();
    for (int i = 0; i < n; ++i) {
      std::vector<double> xi = x0;
      double step = 0.1 * (space_.upper[i] - space_.lower[i]);
      if (xi[i] + step > space_.upper[i]) step = -step;
      xi[i] += step;
      clamp(xi);
      if (!try_add(xi)) return finish();
    }

    while (out_.evals < budget_) {
      std::stable_sort(simplex_.begin(), simplex_.end(),
                       [](const Vertex& a, const Vertex& b) { return a.val > b.val; });
      const Vertex& best = simplex_.front();
      Vertex& worst = simplex_.back();
      const double second_worst = simplex_[simplex_.size() - 2].val;

      std::vector<double> centroid(n, 0.0);
      for (std::size_t k = 0; k + 1 < simplex_.size(); ++k)
        for (int i = 0; i < n; ++i) centroid[i] += simplex_[k].x[i];
      for (int i = 0; i < n; ++i) centroid[i] /= n;

      auto along = [&](double t) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = centroid[i] + t * (worst.x[i] - centroid[i]);
        clamp(x);
        return x;
      };

      std::vector<double> xr = along(-1.0);
      double fr;
      if (!evaluate(xr, fr)) break;

      if (fr > best.val) {
        std::vector<double> xe = along(-2.0);
        double fe;
        if (!evaluate(xe, fe)) break;
        if (fe > fr)
          worst = {std::move(xe), fe};
        else
          worst = {std::move(xr), fr};
      } else if (fr > second_worst) {
        worst = {std::move(xr), fr};
      } else {
        const bool outside = fr > worst.val;
        std::vector<double> xc = along(outside ? -0.5 : 0.5);
        double fc;
        if (!evaluate(xc, fc)) break;
        if (fc > (outside ? fr : worst.val)) {
          worst = {std::move(xc), fc};
        } else {
          // Shrink toward the best vertex.
          bool exhausted = false;
          for (std::size_t k = 1; k < simplex_.size(); ++k) {
            for (int i = 0; i < n; ++i)
              simplex_[k].x[i] =
                  simplex_[0].x[i] + 0.5 * (simplex_[k].x[i] - simplex_[0].x[i]);
            clamp(simplex_[k].x);
            if (!evaluate(simplex_[k].x, simplex_[k].val)) {
              exhausted = true;
              break;
            }
          }
          if (exhausted) break;
        }
      }

      if (converged()) break;
    }
    return finish();
  }

 private:
  struct Vertex {
    std::vector<double> x;
    double val = kNegInf;
  };

  void clamp(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = std::min(std::max(x[i], space_.lower[i]), space_.upper[i]);
  }

  bool evaluate(const std::vector<double>& x, double& val) {
    if (out_.evals >= budget_) return false;
    val = objective_impl(x, space_, cfg_, rule_);
    ++out_.evals;
    if (val > out_.value) {
      out_.value = val;
      out_.best = x;
      out_.trace.push_back({out_.evals, val});
    }
    return true;
  }

  bool try_add(const std::vector<double>& x) {
    double val;
    if (!evaluate(x, val)) return false;
    simplex_.push_back({x, val});
    return true;
  }

  bool converged() const {
    double lo = simplex_.front().val, hi = simplex_.front().val;
    for (const Vertex& v : simplex_) {
      lo = std::min(lo, v.val);
      hi = std::max(hi, v.val);
    }
    if (lo == kNegInf) return false;
    return hi - lo < 1e-13;
  }

  RestartOutcome finish() { return std::move(out_); }

  const SearchSpace& space_;
  const EvalConfig& cfg_;
  const QuadratureRule& rule_;
  const std::int64_t budget_;
  std::vector<Vertex> simplex_;
  RestartOutcome out_;
};

std::vector<double> random_point(const SearchSpace& space, std::mt19937_64& rng) {
  const int n = space.dimension();
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = uniform(rng, space.lower[i], space.upper[i]);
  return x;
}

SearchSpace with_default_bounds(SearchSpace s, double shift_bound) {
  const int n = s.dimension();
  s.lower.assign(n, -5.0);
  s.upper.assign(n, 5.0);
  s.lower[0] = 0.3;
  s.upper[0] = 1.5;
  for (int i = n - s.shift_degree; i < n; ++i) {
    s.lower[i] = -shift_bound;
    s.upper[i] = shift_bound;
  }
  return s;
}

}  // namespace

int SearchSpace::dimension() const {
  if (piece_degrees.empty() || piece_degrees[0] < 1)
    throw std::invalid_argument("search space needs P_1 of degree >= 1");
  int d = 1 + (piece_degrees[0] - 1) + shift_degree;
  for (std::size_t j = 1; j < piece_degrees.size(); ++j) {
    if (piece_degrees[j] < 1) throw std::invalid_argument("piece degrees must be >= 1");
    d += piece_degrees[j];
  }
  return d;
}

DecodedCandidate decode(const std::vector<double>& params, const SearchSpace& space) {
  if (static_cast<int>(params.size()) != space.dimension())
    throw std::invalid_argument("parameter vector size mismatch");
  DecodedCandidate out;
  std::size_t k = 0;
  out.R = params[k++];

  const int d1 = space.piece_degrees[0];
  Polynomial p1;
  if (space.p1_basis == P1Basis::power) {
    p1.coeffs.assign(d1 + 1, 0.0);
    double sum = 0.0;
    for (int i = 1; i < d1; ++i) {
      p1.coeffs[i] = params[k];
      sum += params[k];
      ++k;
    }
    p1.coeffs[d1] = 1.0 - sum;
  } else {
    p1 = Polynomial({0.0, 1.0});
    Polynomial bump({0.0, 1.0});
    const Polynomial omx({1.0, -1.0});
    for (int i = 1; i < d1; ++i) {
      bump = bump * omx;
      p1 = p1 + params[k++] * bump;
    }
  }
  out.mollifier.I = static_cast<int>(space.piece_degrees.size());
  out.mollifier.pieces.push_back(p1);
  for (std::size_t j = 1; j < space.piece_degrees.size(); ++j) {
    Polynomial pj;
    pj.coeffs.assign(space.piece_degrees[j] + 1, 0.0);
    for (int i = 1; i <= space.piece_degrees[j]; ++i) pj.coeffs[i] = params[k++];
    out.mollifier.pieces.push_back(pj);
  }

  Polynomial sh;
  sh.coeffs.assign(space.shift_degree + 1, 0.0);
  for (int i = 1; i <= space.shift_degree; ++i) sh.coeffs[i] = params[k++];
  if (space.mode == ShiftMode::low_T) {
    sh.coeffs[0] = 1.0;
  } else {
    const double c = (1.0 + space.eta) / 2.0;
    double acc = 0.0, cp = 1.0;
    for (int i = 1; i <= space.shift_degree; ++i) {
      cp *= c;
      acc += sh.coeffs[i] * cp;
    }
    sh.coeffs[0] = 1.0 - acc;
  }
  out.shift = {sh, space.mode};
  return out;
}

double objective(const std::vector<double>& params, const SearchSpace& space,
                 const EvalConfig& cfg) {
  return objective_impl(params, space, cfg, gauss_legendre_01(cfg.quad_order));
}

OptimResult optimize(const SearchSpace& space, const EvalConfig& cfg,
                     std::int64_t budget, std::uint64_t seed,
                     const std::optional<std::vector<double>>& warm_start,
                     int threads) {
  if (space.lower.size() != static_cast<std::size_t>(space.dimension()) ||
      space.upper.size() != static_cast<std::size_t>(space.dimension()))
    throw std::invalid_argument("search space bounds not sized to dimension");
  const QuadratureRule rule = gauss_legendre_01(cfg.quad_order);
  const int dim = space.dimension();

  OptimResult result;

  // Too small to hold a simplex: report the start point itself.
  const std::int64_t search_budget = budget > 0 ? budget - 1 : 0;
  if (search_budget < dim + 2) {
    std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
    result.best_raw = warm_start ? *warm_start : random_point(space, rng);
    result.best_proportion = objective_impl(result.best_raw, space, cfg, rule);
    result.evaluations = 1;
    result.trace.push_back({1, result.best_proportion});
    result.best_params = decode(result.best_raw, space);
    return result;
  }

  const std::int64_t restarts =
      std::clamp<std::int64_t>(search_budget / 2500, 1, 8);
  const std::int64_t per_restart = search_budget / restarts;

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
  auto run_one = [&](std::int64_t r) {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(r + 1)));
    std::vector<double> x0 =
        (r == 0 && warm_start) ? *warm_start : random_point(space, rng);
    NelderMead nm(space, cfg, rule, per_restart);
    outcomes[static_cast<std::size_t>(r)] = nm.run(std::move(x0));
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(restarts)));
  if (workers <= 1) {
    for (std::int64_t r = 0; r < restarts; ++r) run_one(r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        // Static stride assignment keeps the work partition deterministic.
        for (std::int64_t r = w; r < restarts; r += workers) run_one(r);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  // Deterministic merge: earlier restarts win ties.
  double best_val = kNegInf;
  std::size_t best_r = 0;
  std::int64_t offset = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    for (const TracePoint& tp : outcomes[r].trace)
      if (tp.value > best_val) {
        best_val = tp.value;
        best_r = r;
        result.trace.push_back({offset + tp.iteration, tp.value});
      }
    offset += outcomes[r].evals;
    result.evaluations += outcomes[r].evals;
  }

  if (outcomes[best_r].best.empty()) {
    // Every evaluation came back infeasible; fall back to the start point.
    std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
    result.best_raw = warm_start ? *warm_start : random_point(space, rng);
  } else {
    result.best_raw = outcomes[best_r].best;
  }

  // Fresh evaluation at reporting time; no cached value is trusted.
  result.best_proportion = objective_impl(result.best_raw, space, cfg, rule);
  ++result.evaluations;
  result.best_params = decode(result.best_raw, space);
  return result;
}

SearchSpace theorem1_simple_space() {
  SearchSpace s;
  s.eta = 0.0;
  s.mode = ShiftMode::low_T;
  s.piece_degrees = {3, 2, 1};
  s.shift_degree = 1;
  s.p1_basis = P1Basis::power;
  return with_default_bounds(std::move(s), 3.0);
}

std::vector<double> theorem1_simple_start() {
  const presets::Preset& p = presets::theorem1_simple();
  return {p.config.R,
          p.mollifier.pieces[0].coeffs[1],
          p.mollifier.pieces[0].coeffs[2],
          p.mollifier.pieces[1].coeffs[1],
          p.mollifier.pieces[1].coeffs[2],
          p.mollifier.pieces[2].coeffs[1],
          p.shift.poly.coeffs[1]};
}

SearchSpace theorem1_critical_space() {
  SearchSpace s;
  s.eta = 0.0;
  s.mode = ShiftMode::low_T;
  s.piece_degrees = {4, 2, 1};
  s.shift_degree = 5;
  s.p1_basis = P1Basis::one_minus_x_bumps;
  return with_default_bounds(std::move(s), 5.0);
}

std::vector<double> theorem1_critical_start() {
  const presets::Preset& p = presets::theorem1_critical();
  std::vector<double> x = {p.config.R, 0.1560, -1.4045, -0.0662,
                           p.mollifier.pieces[1].coeffs[1],
                           p.mollifier.pieces[1].coeffs[2],
                           p.mollifier.pieces[2].coeffs[1]};
  for (int i = 1; i <= 5; ++i) x.push_back(p.shift.poly.coeffs[i]);
  return x;
}

SearchSpace eta_space(double eta) {
  SearchSpace s;
  s.eta = eta;
  s.mode = ShiftMode::eta;
  s.piece_degrees = {3, 2, 1};
  s.shift_degree = 1;
  s.p1_basis = P1Basis::power;
  return with_default_bounds(std::move(s), 3.0);
}

}  // namespace critline
