#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "critline/functional.hpp"
#include "critline/optimizer.hpp"
#include "critline/presets.hpp"
#include "critline/verify.hpp"

using json = nlohmann::ordered_json;
using namespace critline;

namespace {

constexpr double kTheoremTol = 5e-4;

// Shortest decimal representation that round-trips; keeps all emitted
// numbers byte-stable across reruns.
std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

int env_threads() {
  if (const char* s = std::getenv("CRITLINE_THREADS")) {
    int n = 0;
    auto [ptr, ec] = std::from_chars(s, s + std::string_view(s).size(), n);
    if (ec == std::errc() && *ptr == '\0' && n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// ---------------------------------------------------------------------------
// Config ingestion. Unknown keys anywhere are hard errors so typos cannot
// silently fall back to defaults.

struct ConfigError {
  std::string message;
};

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
  throw ConfigError{"config error at " + path + ": " + what};
}

void require_known_keys(const json& obj, const std::set<std::string>& allowed,
                        const std::string& path) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      config_fail(path, "unknown key '" + item.key() + "'");
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number()) config_fail(path + "." + key, "expected a number");
  return v.get<double>();
}

std::vector<double> number_array(const json& v, const std::string& path) {
  if (!v.is_array()) config_fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) config_fail(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

struct OptimizeBlock {
  std::int64_t budget = 5000;
  std::uint64_t seed = 1;
  bool warm_start = false;
  P1Basis p1_basis = P1Basis::power;
  std::optional<std::vector<double>> lower, upper;
};

struct RunConfig {
  EvalConfig cfg;
  MollifierSet mollifier;
  ShiftPolynomialSpec shift;
  std::optional<OptimizeBlock> optimize;
  std::optional<std::vector<double>> table_grid;
};

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) config_fail("$", "top level must be an object");
  require_known_keys(doc,
                     {"mode", "eta", "R", "mollifier", "shift_poly", "quad_order",
                      "jet_order_cap", "series_switch", "optimize", "table1"},
                     "$");
  RunConfig rc;

  const std::string mode = doc.value("mode", std::string("low_T"));
  if (mode == "low_T")
    rc.shift.mode = ShiftMode::low_T;
  else if (mode == "eta")
    rc.shift.mode = ShiftMode::eta;
  else
    config_fail("$.mode", "expected \"low_T\" or \"eta\"");

  if (doc.contains("R")) rc.cfg.R = number_at(doc, "R", "$");
  if (doc.contains("eta")) rc.cfg.eta = number_at(doc, "eta", "$");
  if (doc.contains("quad_order"))
    rc.cfg.quad_order = static_cast<int>(number_at(doc, "quad_order", "$"));
  if (doc.contains("jet_order_cap"))
    rc.cfg.jet_order_cap = static_cast<int>(number_at(doc, "jet_order_cap", "$"));
  if (doc.contains("series_switch"))
    rc.cfg.series_switch = number_at(doc, "series_switch", "$");

  if (doc.contains("mollifier")) {
    const json& mol = doc.at("mollifier");
    if (!mol.is_object()) config_fail("$.mollifier", "expected an object");
    require_known_keys(mol, {"I", "pieces"}, "$.mollifier");
    if (!mol.contains("pieces"))
      config_fail("$.mollifier", "missing required key 'pieces'");
    const json& pieces = mol.at("pieces");
    if (!pieces.is_array() || pieces.empty())
      config_fail("$.mollifier.pieces", "expected a nonempty array of arrays");
    rc.mollifier.pieces.clear();
    for (std::size_t i = 0; i < pieces.size(); ++i)
      rc.mollifier.pieces.emplace_back(
          number_array(pieces[i], "$.mollifier.pieces[" + std::to_string(i) + "]"));
    rc.mollifier.I = static_cast<int>(rc.mollifier.pieces.size());
    if (mol.contains("I")) {
      const int declared = static_cast<int>(number_at(mol, "I", "$.mollifier"));
      if (declared != rc.mollifier.I)
        config_fail("$.mollifier.I", "does not match the number of pieces");
    }
  }

  if (doc.contains("shift_poly"))
    rc.shift.poly = Polynomial(number_array(doc.at("shift_poly"), "$.shift_poly"));

  if (doc.contains("optimize")) {
    const json& ob = doc.at("optimize");
    if (!ob.is_object()) config_fail("$.optimize", "expected an object");
    require_known_keys(ob, {"budget", "seed", "bounds", "warm_start", "p1_basis"},
                       "$.optimize");
    OptimizeBlock blk;
    if (ob.contains("budget"))
      blk.budget = static_cast<std::int64_t>(number_at(ob, "budget", "$.optimize"));
    if (ob.contains("seed"))
      blk.seed = static_cast<std::uint64_t>(number_at(ob, "seed", "$.optimize"));
    if (ob.contains("warm_start")) {
      if (!ob.at("warm_start").is_boolean())
        config_fail("$.optimize.warm_start", "expected a boolean");
      blk.warm_start = ob.at("warm_start").get<bool>();
    }
    if (ob.contains("p1_basis")) {
      const std::string b = ob.at("p1_basis").get<std::string>();
      if (b == "power")
        blk.p1_basis = P1Basis::power;
      else if (b == "one_minus_x_bumps")
        blk.p1_basis = P1Basis::one_minus_x_bumps;
      else
        config_fail("$.optimize.p1_basis", "expected \"power\" or \"one_minus_x_bumps\"");
    }
    if (ob.contains("bounds")) {
      const json& bounds = ob.at("bounds");
      if (!bounds.is_object()) config_fail("$.optimize.bounds", "expected an object");
      require_known_keys(bounds, {"lower", "upper"}, "$.optimize.bounds");
      if (bounds.contains("lower"))
        blk.lower = number_array(bounds.at("lower"), "$.optimize.bounds.lower");
      if (bounds.contains("upper"))
        blk.upper = number_array(bounds.at("upper"), "$.optimize.bounds.upper");
    }
    rc.optimize = blk;
  }

  if (doc.contains("table1")) {
    const json& tb = doc.at("table1");
    if (!tb.is_object()) config_fail("$.table1", "expected an object");
    require_known_keys(tb, {"grid"}, "$.table1");
    if (tb.contains("grid"))
      rc.table_grid = number_array(tb.at("grid"), "$.table1.grid");
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError{"cannot open config file: " + path};
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError{std::string("config parse error: ") + e.what()};
  }
  return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Report serialization.

json config_echo_json(const EvalConfig& cfg) {
  return json{{"R", cfg.R},
              {"eta", cfg.eta},
              {"quad_order", cfg.quad_order},
              {"series_switch", cfg.series_switch},
              {"jet_order_cap", cfg.jet_order_cap}};
}

json report_json(const ProportionReport& r) {
  json violations = json::array();
  for (const NamedResidual& v : r.constraint_violations)
    violations.push_back(json{{"name", v.name}, {"value", v.value}});
  return json{{"K", r.K},
              {"proportion", r.proportion},
              {"constraint_violations", violations},
              {"config_echo", config_echo_json(r.config_echo)},
              {"kernel_variant", r.kernel_variant}};
}

json polynomial_json(const Polynomial& p) {
  json arr = json::array();
  for (double c : p.coeffs) arr.push_back(c);
  return arr;
}

// ---------------------------------------------------------------------------
// Commands.

int cmd_theorem1(const std::string& variant) {
  const presets::Preset* preset = nullptr;
  if (variant == "simple")
    preset = &presets::theorem1_simple();
  else if (variant == "critical")
    preset = &presets::theorem1_critical();
  if (!preset) {
    std::cerr << "usage error: unknown variant '" << variant
              << "' (expected simple or critical)\n";
    return 2;
  }
  ProportionReport report;
  try {
    report = evaluate(preset->shift, preset->mollifier, preset->config);
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  }
  json doc{{"report", report_json(report)},
           {"variant", preset->name},
           {"target", preset->target},
           {"resolution", preset->resolution}};
  std::cout << doc.dump(2) << "\n";
  const double diff = std::abs(report.proportion - preset->target);
  const bool ok = diff <= kTheoremTol;
  std::cout << "theorem1 " << preset->name << ": proportion "
            << format_double(report.proportion) << " target "
            << format_double(preset->target) << " |diff| " << format_double(diff)
            << (ok ? " within " : " OUTSIDE ") << format_double(kTheoremTol) << "\n";
  return ok ? 0 : 1;
}

struct TableRow {
  double eta = 0.0;
  EtaEvaluation eval;
  bool errored = false;
};

std::string table_csv(const std::vector<TableRow>& rows) {
  std::string out = "eta,C_eta,K,R,status\n";
  for (const TableRow& row : rows) {
    out += format_double(row.eta);
    out += ',';
    if (row.eval.feasible) out += format_double(row.eval.proportion);
    out += ',';
    if (!row.errored) out += format_double(row.eval.K);
    out += ',';
    if (!row.errored) out += format_double(row.eval.R);
    out += ',';
    out += row.eval.feasible ? "ok" : "infeasible";
    out += '\n';
  }
  return out;
}

int cmd_table1(const std::vector<double>& grid, const std::string& csv_path) {
  std::vector<TableRow> rows(grid.size());
  const EvalConfig cfg;  // defaults; R and eta come from the fitted set
  const int threads = std::max(1, std::min<int>(env_threads(), static_cast<int>(grid.size())));
  auto work = [&](int w) {
    for (std::size_t i = static_cast<std::size_t>(w); i < grid.size(); i += threads) {
      rows[i].eta = grid[i];
      try {
        rows[i].eval = evaluate_eta_point(grid[i], cfg);
      } catch (const std::exception&) {
        rows[i].errored = true;
      }
    }
  };
  if (threads <= 1 || grid.size() <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }
  const std::string csv = table_csv(rows);
  if (csv_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write CSV to " << csv_path << "\n";
      return 1;
    }
    out << csv;
    std::cout << "wrote " << rows.size() << " rows to " << csv_path << "\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& config_path) {
  RunConfig rc;
  try {
    rc = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.message << "\n";
    return 2;
  }
  if (rc.mollifier.pieces.empty() || rc.shift.poly.coeffs.empty()) {
    std::cerr << "config error: evaluate needs 'mollifier' and 'shift_poly'\n";
    return 2;
  }
  if (rc.cfg.R <= 0.0) {
    std::cerr << "config error at $.R: a positive radius is required\n";
    return 2;
  }
  ProportionReport report;
  try {
    report = evaluate(rc.shift, rc.mollifier, rc.cfg);
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  }
  json doc{{"report", report_json(report)}};
  std::cout << doc.dump(2) << "\n";
  std::cout << "evaluate: K " << format_double(report.K) << " proportion "
            << format_double(report.proportion) << " violations "
            << report.constraint_violations.size() << "\n";
  return 0;
}

// Express P_1 - x in the x(1-x)^k basis by matching coefficients from the
// top degree down (the change of basis is triangular there).
std::vector<double> bump_coordinates(const Polynomial& p1, int d1) {
  Polynomial rem = p1 - Polynomial({0.0, 1.0});
  std::vector<double> s(static_cast<std::size_t>(d1 - 1), 0.0);
  std::vector<Polynomial> bumps;
  Polynomial bump({0.0, 1.0});
  const Polynomial omx({1.0, -1.0});
  for (int k = 1; k < d1; ++k) {
    bump = bump * omx;
    bumps.push_back(bump);
  }
  for (int k = d1 - 1; k >= 1; --k) {
    const Polynomial& b = bumps[static_cast<std::size_t>(k - 1)];
    double top = 0.0;
    if (static_cast<int>(rem.coeffs.size()) > k + 1) top = rem.coeffs[k + 1];
    const double lead = b.coeffs[static_cast<std::size_t>(k + 1)];
    const double coef = top / lead;
    s[static_cast<std::size_t>(k - 1)] = coef;
    rem = rem - coef * b;
  }
  return s;
}

std::vector<double> encode_warm_start(const RunConfig& rc, const SearchSpace& space) {
  std::vector<double> x;
  x.push_back(rc.cfg.R);
  const Polynomial& p1 = rc.mollifier.pieces[0];
  const int d1 = space.piece_degrees[0];
  if (space.p1_basis == P1Basis::power) {
    for (int i = 1; i < d1; ++i)
      x.push_back(i < static_cast<int>(p1.coeffs.size()) ? p1.coeffs[i] : 0.0);
  } else {
    for (double v : bump_coordinates(p1, d1)) x.push_back(v);
  }
  for (std::size_t j = 1; j < rc.mollifier.pieces.size(); ++j) {
    const Polynomial& pj = rc.mollifier.pieces[j];
    for (int i = 1; i <= space.piece_degrees[j]; ++i)
      x.push_back(i < static_cast<int>(pj.coeffs.size()) ? pj.coeffs[i] : 0.0);
  }
  for (int i = 1; i <= space.shift_degree; ++i)
    x.push_back(i < static_cast<int>(rc.shift.poly.coeffs.size())
                    ? rc.shift.poly.coeffs[i]
                    : 0.0);
  return x;
}

int cmd_optimize(const std::string& config_path, std::optional<std::int64_t> budget_flag,
                 std::optional<std::uint64_t> seed_flag) {
  RunConfig rc;
  try {
    rc = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.message << "\n";
    return 2;
  }
  if (rc.mollifier.pieces.empty() || rc.shift.poly.coeffs.empty()) {
    std::cerr << "config error: optimize needs 'mollifier' and 'shift_poly' "
                 "to define the search space\n";
    return 2;
  }
  OptimizeBlock blk = rc.optimize.value_or(OptimizeBlock{});
  if (budget_flag) blk.budget = *budget_flag;
  if (seed_flag) blk.seed = *seed_flag;

  SearchSpace space;
  space.eta = rc.cfg.eta;
  space.mode = rc.shift.mode;
  space.p1_basis = blk.p1_basis;
  for (const Polynomial& p : rc.mollifier.pieces)
    space.piece_degrees.push_back(std::max(1, p.degree()));
  space.shift_degree = std::max(1, rc.shift.poly.degree());
  const int dim = space.dimension();
  space.lower.assign(dim, -5.0);
  space.upper.assign(dim, 5.0);
  space.lower[0] = 0.3;
  space.upper[0] = 1.5;
  if (blk.lower) {
    if (static_cast<int>(blk.lower->size()) != dim) {
      std::cerr << "config error at $.optimize.bounds.lower: expected " << dim
                << " entries\n";
      return 2;
    }
    space.lower = *blk.lower;
  }
  if (blk.upper) {
    if (static_cast<int>(blk.upper->size()) != dim) {
      std::cerr << "config error at $.optimize.bounds.upper: expected " << dim
                << " entries\n";
      return 2;
    }
    space.upper = *blk.upper;
  }

  std::optional<std::vector<double>> warm;
  if (blk.warm_start) warm = encode_warm_start(rc, space);

  OptimResult result =
      optimize(space, rc.cfg, blk.budget, blk.seed, warm, env_threads());

  json mol = json::array();
  for (const Polynomial& p : result.best_params.mollifier.pieces)
    mol.push_back(polynomial_json(p));
  json trace = json::array();
  for (const TracePoint& tp : result.trace)
    trace.push_back(json::array({tp.iteration, tp.value}));
  json doc{{"result",
            {{"best_proportion", result.best_proportion},
             {"evaluations", result.evaluations},
             {"best_params",
              {{"R", result.best_params.R},
               {"mollifier", mol},
               {"shift_poly", polynomial_json(result.best_params.shift.poly)},
               {"mode", space.mode == ShiftMode::low_T ? "low_T" : "eta"}}},
             {"raw", result.best_raw},
             {"trace", trace}}}};
  std::cout << doc.dump(2) << "\n";
  std::cout << "optimize: best " << format_double(result.best_proportion) << " in "
            << result.evaluations << " evaluations\n";
  return 0;
}

int cmd_verify() {
  int failures = 0;
  int checks = 0;

  const double alphas[] = {0.0, 0.3, -0.2};
  const double ds[] = {2.0, std::exp(1.0), 10.0};
  const Polynomial fs[] = {Polynomial({1.0}), Polynomial({0.0, 1.0}),
                           Polynomial({0.0, 0.0, 1.0})};
  const char* fnames[] = {"1", "x", "x^2"};
  for (int m = 1; m <= 3; ++m)
    for (int fi = 0; fi < 3; ++fi)
      for (double alpha : alphas)
        for (double D : ds) {
          const double res = lemma36_residual(m, fs[fi], D, alpha, 48);
          const bool ok = res <= 1e-8;
          ++checks;
          if (!ok) ++failures;
          std::cout << "lemma36 m=" << m << " f=" << fnames[fi]
                    << " alpha=" << format_double(alpha) << " D=" << format_double(D)
                    << " residual=" << format_double(res) << (ok ? " PASS" : " FAIL")
                    << "\n";
        }

  const std::vector<std::vector<std::uint64_t>> prime_sets = {
      {2, 3, 5}, {2, 3, 5, 7}, {2, 3, 5, 7, 11}};
  for (const auto& primes : prime_sets)
    for (int m1 = 1; m1 <= 3; ++m1)
      for (int m2 = 1; m2 <= 3; ++m2) {
        auto [lhs, rhs] = lemma37_sides({primes, m1, m2});
        const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        const double rel = std::abs(lhs - rhs) / denom;
        const bool ok = rel <= 1e-12;
        ++checks;
        if (!ok) ++failures;
        std::cout << "lemma37 primes=" << primes.size() << " m1=" << m1
                  << " m2=" << m2 << " rel=" << format_double(rel)
                  << (ok ? " PASS" : " FAIL") << "\n";
      }

  std::cout << "verify: " << (checks - failures) << "/" << checks << " checks passed\n";
  return failures == 0 ? 0 : 1;
}

int cmd_root(double lo, double hi) {
  const EvalConfig cfg;
  std::optional<double> root;
  try {
    root = c_root(lo, hi, 1e-3, cfg);
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  }
  if (!root) {
    std::cerr << "no sign change on [" << format_double(lo) << ", "
              << format_double(hi) << "]\n";
    return 1;
  }
  json doc{{"root", *root}};
  std::cout << doc.dump(2) << "\n";
  std::cout << "root: " << format_double(*root) << "\n";
  return 0;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    grid.push_back(std::stod(tok));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proportion-of-critical-zeros functional evaluator"};
  app.require_subcommand(1);

  std::string variant;
  CLI::App* theorem1 = app.add_subcommand("theorem1", "reproduce the two headline bounds");
  theorem1->add_option("--variant", variant, "simple | critical")->required();

  std::string grid_spec, csv_path;
  CLI::App* table1 = app.add_subcommand("table1", "C(eta) over an eta grid as CSV");
  table1->add_option("--grid", grid_spec, "comma-separated eta values");
  table1->add_option("--csv", csv_path, "write CSV to this path");

  std::string eval_config;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "evaluate a configured functional");
  eval_cmd->add_option("--config", eval_config, "JSON config path")->required();

  std::string opt_config;
  std::int64_t budget_flag = -1;
  std::int64_t seed_flag = -1;
  CLI::App* opt_cmd = app.add_subcommand("optimize", "search coefficients for a better bound");
  opt_cmd->add_option("--config", opt_config, "JSON config path")->required();
  opt_cmd->add_option("--budget", budget_flag, "evaluation budget");
  opt_cmd->add_option("--seed", seed_flag, "random seed");

  app.add_subcommand("verify", "run the identity oracles");

  double root_lo = 4.5, root_hi = 5.5;
  CLI::App* root_cmd = app.add_subcommand("root", "bisection root of C(eta)");
  root_cmd->add_option("--lo", root_lo, "bracket lower end");
  root_cmd->add_option("--hi", root_hi, "bracket upper end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (theorem1->parsed()) return cmd_theorem1(variant);
    if (table1->parsed()) {
      std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 3.0, 4.0, 5.0};
      if (table1->count("--grid") > 0) grid = parse_grid(grid_spec);
      return cmd_table1(grid, csv_path);
    }
    if (eval_cmd->parsed()) return cmd_evaluate(eval_config);
    if (opt_cmd->parsed())
      return cmd_optimize(opt_config,
                          budget_flag >= 0 ? std::optional<std::int64_t>(budget_flag)
                                           : std::nullopt,
                          seed_flag >= 0
                              ? std::optional<std::uint64_t>(
                                    static_cast<std::uint64_t>(seed_flag))
                              : std::nullopt);
    if (app.get_subcommand("verify")->parsed()) return cmd_verify();
    if (root_cmd->parsed()) return cmd_root(root_lo, root_hi);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
