// Serial reference vs OpenMP pixel-difference kernel.
#include <benchmark/benchmark.h>

#include <random>

#include "citits/kernels.hpp"

using namespace citits;

namespace {

struct Inputs {
  Raster baseline;
  Raster current;
  Mask mask;
  Raster processed;
};

Inputs make_inputs(int side) {
  std::mt19937 rng(7);
  Inputs in{Raster(side, side), Raster(side, side), Mask(side, side), Raster(side, side)};
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const auto v = static_cast<std::uint8_t>(rng() & 0xFF);
      in.baseline.at(x, y) = {v, v, v};
      const auto w = static_cast<std::uint8_t>(rng() & 0xFF);
      in.current.at(x, y) = {w, v, v};
      in.mask.set(x, y, (rng() & 3) != 0);
    }
  }
  return in;
}

void BM_DiffSerial(benchmark::State& state) {
  auto in = make_inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::diff_serial(in.baseline, in.current, in.mask, 10, &in.processed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_DiffParallel(benchmark::State& state) {
  auto in = make_inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::diff_parallel(in.baseline, in.current, in.mask, 10, &in.processed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
  state.counters["threads"] = kernels::max_threads();
}

}  // namespace

BENCHMARK(BM_DiffSerial)->Arg(64)->Arg(512)->Arg(2048);
BENCHMARK(BM_DiffParallel)->Arg(64)->Arg(512)->Arg(2048);

BENCHMARK_MAIN();
