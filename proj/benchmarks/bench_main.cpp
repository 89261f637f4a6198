#include <benchmark/benchmark.h>

#include "kerrkit/datasets.hpp"
#include "kerrkit/fockspace.hpp"
#include "kerrkit/kernels.hpp"
#include "kerrkit/lattice.hpp"
#include "kerrkit/svm.hpp"

namespace kerrkit {
namespace {

void BM_KerrPhaseKernel(benchmark::State& state) {
  const KerrParams p(-2.0, 1.0);
  double phi = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kerr_phase_neg(phi, 1.3, 0.5, p));
    phi += 1e-3;
  }
}
BENCHMARK(BM_KerrPhaseKernel);

void BM_KerrAmpKernel(benchmark::State& state) {
  const KerrParams p(2.0, 2.5);
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kerr_amp_pos(x, 0.7, p));
    x += 1e-6;
  }
}
BENCHMARK(BM_KerrAmpKernel);

// make_moons needs a non-empty test portion; the benchmarks use the first n rows.
Dataset moons(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return subset(make_moons(n, 1, 0.1, 7), rows);
}

void BM_Gram(benchmark::State& state) {
  const Dataset d = moons(state);
  const KernelSpec spec = kerr_phase_spec(0.5, -2.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gram(d.features, spec).values.data());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gram)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNSquared);

void BM_Smo(benchmark::State& state) {
  const Dataset d = moons(state);
  const GramMatrix g = gram(d.features, kerr_phase_spec(0.5, -2.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(train_svm(g, d.labels, 10.0).bias);
}
BENCHMARK(BM_Smo)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_DisplaceVacuum(benchmark::State& state) {
  const KerrParams p(2.0, 3.0);
  const PolarAmplitude alpha(1.2, 0.4);
  const int dim = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(displace_vacuum(alpha, p, dim).amplitudes.data());
}
BENCHMARK(BM_DisplaceVacuum)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_LatticePropagation(benchmark::State& state) {
  const LatticeConfig cfg = lattice_preset("fig7-pos");
  for (auto _ : state) benchmark::DoNotOptimize(intensity_map(cfg).data());
}
BENCHMARK(BM_LatticePropagation)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kerrkit

BENCHMARK_MAIN();
