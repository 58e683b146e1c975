#include <benchmark/benchmark.h>

#include "quasivar/eigenpair.hpp"
#include "quasivar/energy.hpp"

using namespace quasivar;

namespace {

ExponentConfig supercritical() {
  ExponentConfig c;
  c.p1 = c.p2 = 1.5;
  c.s1 = c.s2 = 1.0;
  c.q1 = c.q2 = 8.0;
  c.gamma1 = c.gamma2 = 4.0;
  c.theta1 = c.theta2 = 0.125;
  c.c_star = 1.0;
  return c;
}

struct Setup {
  explicit Setup(int n)
      : J(std::make_shared<ModelFunctions>(supercritical()), Grid::make(2, n)),
        x(random_sine_field(J.grid_ptr(), 1), random_sine_field(J.grid_ptr(), 2)),
        d(random_sine_field(J.grid_ptr(), 3), random_sine_field(J.grid_ptr(), 4)) {}
  EnergyFunctional J;
  FieldPair x, d;
};

void BM_EnergyValue(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s.J.value(s.x));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.J.grid().elements().size()));
}
BENCHMARK(BM_EnergyValue)->Arg(33)->Arg(65)->Arg(129);

void BM_Differential(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s.J.apply_differential(s.x, s.d));
}
BENCHMARK(BM_Differential)->Arg(33)->Arg(65)->Arg(129);

void BM_GradientRepresentative(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s.J.gradient(s.x));
}
BENCHMARK(BM_GradientRepresentative)->Arg(33)->Arg(65)->Arg(129);

void BM_FirstEigenpair(benchmark::State& state) {
  const GridPtr g = Grid::make(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(first_eigenpair(2.0, g).lambda1);
}
BENCHMARK(BM_FirstEigenpair)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
