#include <benchmark/benchmark.h>

#include <cmath>

#include "cpl/config.hpp"
#include "cpl/dynamics.hpp"
#include "cpl/forcing.hpp"
#include "cpl/scenario.hpp"
#include "cpl/solver.hpp"
#include "cpl/spectrum.hpp"
#include "cpl/symmetry.hpp"
#include "cpl/zeronum.hpp"

namespace {

using namespace cpl;

void BM_DyadicIntegral(benchmark::State& state) {
  const auto f = QuasiPeriodicSignal::dyadic();
  double t = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.integral(t));
    t += 1.37;
  }
}
BENCHMARK(BM_DyadicIntegral);

void BM_StepAppendix(benchmark::State& state) {
  const CircleGrid g(static_cast<int>(state.range(0)));
  SemiflowStepper s(g, make_hull_point(QuasiPeriodicSignal::dyadic()), Nonlinearity::appendix(), 1e-3);
  s.reset(Field::from_function(g, [](double x) { return std::sin(x); }));
  for (auto _ : state) s.step();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepAppendix)->RangeMultiplier(2)->Range(32, 256);

void BM_StepCubic(benchmark::State& state) {
  const CircleGrid g(static_cast<int>(state.range(0)));
  Nonlinearity nl = Nonlinearity::burgers(1.0);
  nl.C = QuasiPeriodicSignal::constant(-1.0);
  SemiflowStepper s(g, make_hull_point(QuasiPeriodicSignal::from_modes({{1.0, 1.0, 0.0}})), nl, 1e-3);
  s.reset(make_initial("random:1:6", g));
  for (auto _ : state) s.step();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepCubic)->RangeMultiplier(2)->Range(32, 256);

void BM_ZeroNumber(benchmark::State& state) {
  const CircleGrid g(static_cast<int>(state.range(0)));
  const auto u = make_initial("random:3:8", g);
  for (auto _ : state) benchmark::DoNotOptimize(zero_number(u).count);
}
BENCHMARK(BM_ZeroNumber)->RangeMultiplier(4)->Range(32, 512);

void BM_OrbitDistance(benchmark::State& state) {
  const CircleGrid g(static_cast<int>(state.range(0)));
  const auto u = make_initial("random:4:6", g);
  const auto v = make_initial("random:5:6", g);
  for (auto _ : state) benchmark::DoNotOptimize(orbit_distance(u, v).distance);
}
BENCHMARK(BM_OrbitDistance)->RangeMultiplier(2)->Range(32, 128);

void BM_LyapunovWindow(benchmark::State& state) {
  SpectrumOptions o;
  o.window = 10.0;
  o.m = static_cast<int>(state.range(0));
  const Field zero(CircleGrid(32));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        lyapunov_exponents(zero, make_hull_point(QuasiPeriodicSignal::dyadic()), Nonlinearity::appendix(), 0.01, o)
            .exponents);
}
BENCHMARK(BM_LyapunovWindow)->Arg(1)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ModeZeroBounds(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mode_zero_bounds_check(1, 3, 100).passed);
}
BENCHMARK(BM_ModeZeroBounds)->Unit(benchmark::kMillisecond);

void BM_VerifyAppendix(benchmark::State& state) {
  const int windows = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_appendix(20, windows).holds);
}
BENCHMARK(BM_VerifyAppendix)->Arg(0)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
