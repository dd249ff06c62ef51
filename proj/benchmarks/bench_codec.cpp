#include <benchmark/benchmark.h>

#include "ggi/mesh_io.hpp"
#include "ggi/raster.hpp"
#include "ggi/remesh.hpp"
#include "ggi/stitcher.hpp"

namespace {

ggi::GgiRaster skirt_raster(int resolution, int n) {
  ggi::FixtureParams params;
  params.n = n;
  const ggi::Fixture fx = ggi::make_fixture(ggi::FixtureKind::kMultiPanelSkirt, params);
  ggi::EncodeOptions opts;
  opts.resolution = resolution;
  return ggi::encode(fx.pattern, fx.meshes, opts);
}

void BM_Encode(benchmark::State& state) {
  ggi::FixtureParams params;
  params.n = 48;
  const ggi::Fixture fx = ggi::make_fixture(ggi::FixtureKind::kMultiPanelSkirt, params);
  ggi::EncodeOptions opts;
  opts.resolution = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ggi::encode(fx.pattern, fx.meshes, opts));
  }
}
BENCHMARK(BM_Encode)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Remesh(benchmark::State& state) {
  const ggi::GgiRaster raster = skirt_raster(int(state.range(0)), 48);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ggi::remesh(raster));
  }
}
BENCHMARK(BM_Remesh)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const ggi::GgiRaster raster = skirt_raster(int(state.range(0)), 48);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ggi::assemble(raster));
  }
}
BENCHMARK(BM_Assemble)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
