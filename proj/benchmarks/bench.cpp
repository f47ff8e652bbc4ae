#include <benchmark/benchmark.h>

#include "critline/functional.hpp"
#include "critline/presets.hpp"

using namespace critline;

namespace {

void BM_exp_moment_closed(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(exp_moment(4, -1.5, 0.9));
}
BENCHMARK(BM_exp_moment_closed);

void BM_exp_moment_series(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(exp_moment(4, 1e-7, 0.9));
}
BENCHMARK(BM_exp_moment_series);

void BM_moment_integral_scalar(benchmark::State& state) {
  const presets::Preset& p = presets::theorem1_simple();
  const QuadratureRule rule = gauss_legendre_01(p.config.quad_order);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        moment_integral(-0.715, -0.715, p.mollifier, rule));
}
BENCHMARK(BM_moment_integral_scalar);

void BM_moment_integral_jets(benchmark::State& state) {
  const presets::Preset& p = presets::theorem1_simple();
  const QuadratureRule rule = gauss_legendre_01(p.config.quad_order);
  const int n = static_cast<int>(state.range(0));
  const BiJet a = BiJet::variable_a(-0.715, -0.715, n, n);
  const BiJet b = BiJet::variable_b(-0.715, -0.715, n, n);
  for (auto _ : state)
    benchmark::DoNotOptimize(moment_integral(a, b, p.mollifier, rule));
}
BENCHMARK(BM_moment_integral_jets)->Arg(1)->Arg(3)->Arg(5);

void BM_k_low_t_simple(benchmark::State& state) {
  const presets::Preset& p = presets::theorem1_simple();
  const QuadratureRule rule = gauss_legendre_01(p.config.quad_order);
  for (auto _ : state)
    benchmark::DoNotOptimize(k_low_t(p.shift, p.mollifier, p.config, rule));
}
BENCHMARK(BM_k_low_t_simple);

void BM_k_low_t_critical(benchmark::State& state) {
  const presets::Preset& p = presets::theorem1_critical();
  const QuadratureRule rule = gauss_legendre_01(p.config.quad_order);
  for (auto _ : state)
    benchmark::DoNotOptimize(k_low_t(p.shift, p.mollifier, p.config, rule));
}
BENCHMARK(BM_k_low_t_critical);

void BM_c_of_eta(benchmark::State& state) {
  EvalConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(c_of_eta(1.0, cfg));
}
BENCHMARK(BM_c_of_eta);

void BM_gauss_legendre_01(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(gauss_legendre_01(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_gauss_legendre_01)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
