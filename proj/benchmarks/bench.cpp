#include <cmath>

#include <benchmark/benchmark.h>

#include "qmod/capacity.hpp"
#include "qmod/orlicz.hpp"
#include "qmod/radial.hpp"

namespace {

using namespace qmod;

void BM_RingIntegralLogPower(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Point c(n, 0.0);
  const ScalarField q(LogPowerField{c, 1.0}, Ball{c, 1.0});
  const RingCondenser ring(c, 1e-3, 0.9);
  const Exponents e(n, n == 2 ? 2.0 : 2.5);
  const SphereQuadrature quad = SphereQuadrature::default_for(n);
  for (auto _ : state) benchmark::DoNotOptimize(ring_integral(q, ring, e, quad).value.value());
}
BENCHMARK(BM_RingIntegralLogPower)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_OrliczBoundExp(benchmark::State& state) {
  const OrliczGauge phi(ExponentialGauge{});
  const Exponents e(3, 2.5);
  const Point x0{0, 0, 0};
  double eps = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ring_integral_lower_bound(phi, e, MassBudget(24.78), x0, 0.9, eps));
    eps = eps > 1e-200 ? eps * 0.5 : 1e-3;
  }
}
BENCHMARK(BM_OrliczBoundExp);

void BM_DiscreteCapacityPlaneRing(benchmark::State& state) {
  const Condenser ring{Ball{{0, 0}, std::exp(1.0)}, Ball{{0, 0}, 1.0}};
  DiscreteCapacityOptions o;
  o.resolution = static_cast<int>(state.range(0));
  o.jobs = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(discrete_p_capacity(ring, Exponents(2, 2), o).energy);
}
BENCHMARK(BM_DiscreteCapacityPlaneRing)->Args({64, 1})->Args({128, 1})->Args({128, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
