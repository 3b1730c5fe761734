// Serial reference vs OpenMP kernels.
#include "nbk/actions.hpp"
#include "nbk/nctorus.hpp"
#include "nbk/random.hpp"

#include <benchmark/benchmark.h>

using namespace nbk;

namespace {

struct MulInput {
  ThetaMatrix theta = standard_theta(3);
  TorusElement x, y;
  explicit MulInput(int terms) : x(3), y(3) {
    Sampler s(11);
    x = s.torus(theta, 3, terms);
    y = s.torus(theta, 3, terms);
  }
};

void BM_mul(benchmark::State& state) {
  const MulInput in(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mul(in.theta, in.x, in.y));
}

void BM_mul_reference(benchmark::State& state) {
  const MulInput in(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::mul(in.theta, in.x, in.y));
}

void BM_scan(benchmark::State& state) {
  const ActionSpec spec = classical_spec("B6");
  for (auto _ : state) benchmark::DoNotOptimize(scan_cocycles(spec, 6));
}

void BM_scan_reference(benchmark::State& state) {
  const ActionSpec spec = classical_spec("B6");
  for (auto _ : state) benchmark::DoNotOptimize(reference::scan_cocycles(spec, 6));
}

}  // namespace

BENCHMARK(BM_mul)->Arg(8)->Arg(32)->Arg(96);
BENCHMARK(BM_mul_reference)->Arg(8)->Arg(32)->Arg(96);
BENCHMARK(BM_scan)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scan_reference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
