#include "kuranishi/fixtures.hpp"
#include "kuranishi/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace kuranishi;

namespace {

const SmoothMap& planar() {
  static const SmoothMap f = SmoothMap::parse({"x1^2 - x2^2 - 1/4", "2*x1*x2"}, 2);
  return f;
}

Box square() { return Box({Rational(-2), Rational(-2)}, {Rational(2), Rational(2)}); }

void BM_EvalBatch(benchmark::State& state, Exec exec) {
  auto pts = sample_box(square(), static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(eval_batch(planar(), pts, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}

void BM_NormBatch(benchmark::State& state, Exec exec) {
  auto pts = sample_box(square(), static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(norm_batch(planar(), pts, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}

void BM_LocateZeros(benchmark::State& state, Exec exec) {
  Domain D = Domain::box(square());
  for (auto _ : state) benchmark::DoNotOptimize(locate_zeros(planar(), D, static_cast<int>(state.range(0)), 3, 1e-7, exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_EvalBatch, serial, Exec::Serial)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_EvalBatch, openmp, Exec::Parallel)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_NormBatch, serial, Exec::Serial)->Arg(400);
BENCHMARK_CAPTURE(BM_NormBatch, openmp, Exec::Parallel)->Arg(400);
BENCHMARK_CAPTURE(BM_LocateZeros, serial, Exec::Serial)->Arg(20)->Arg(40);
BENCHMARK_CAPTURE(BM_LocateZeros, openmp, Exec::Parallel)->Arg(20)->Arg(40);

BENCHMARK_MAIN();
