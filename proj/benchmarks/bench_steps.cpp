#include <benchmark/benchmark.h>

#include "qchaos/classical.hpp"
#include "qchaos/density.hpp"
#include "qchaos/phase_space.hpp"
#include "qchaos/quantum.hpp"

namespace {

qchaos::ModelSpec duffing(double hbar, double k) {
  auto m = qchaos::duffing_spec();
  m.hbar = hbar;
  m.k = k;
  return m;
}

void BM_SseStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = duffing(1e-2, 10.0);
  const qchaos::SpatialGrid grid(-6.0, 6.0, n);
  const double dt = model.drive_period() / 1000.0;
  qchaos::SchrodingerPropagator prop(model, grid, dt);
  auto psi = qchaos::coherent_state(grid, model.hbar, 2.0, 0.0, std::sqrt(model.hbar / 2.0));
  qchaos::NoisePath noise(7, dt);
  for (auto _ : state) prop.advance_conditioned(psi, 100, noise);
  state.SetItemsProcessed(state.iterations() * 100 * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SseStep)->Arg(512)->Arg(2048)->Arg(8192);

void BM_LindbladStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto model = duffing(0.1, 0.0);
  model.D = 1e-3;
  const qchaos::SpatialGrid grid(-6.0, 6.0, n);
  qchaos::LindbladPropagator prop(model, grid, model.drive_period() / 100.0);
  auto rho = qchaos::DensityState::pure(qchaos::coherent_state(grid, model.hbar, 2.0, 0.0, 0.2236));
  for (auto _ : state) prop.advance(rho, 10);
  state.SetItemsProcessed(state.iterations() * 10 * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_LindbladStep)->Arg(256)->Arg(1024);

void BM_LiouvilleStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = duffing(0.1, 0.0);
  const qchaos::SpatialGrid xg(-6.0, 6.0, n);
  const qchaos::PhaseSpaceGrid grid(xg, -25.0, 25.0, 2 * n);
  qchaos::PhaseSpacePropagator prop(model, grid, model.drive_period() / 100.0);
  auto f = qchaos::gaussian_field(grid, 2.0, 0.0, 0.05, 0.05);
  for (auto _ : state) prop.advance(f, 10);
  state.SetItemsProcessed(state.iterations() * 10 * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_LiouvilleStep)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
