#include "fm/propagate.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

namespace {

constexpr double kPeriod = 2.0 * std::numbers::pi;

fm::PotentialModel driven_pair() {
    fm::MassGeometry g({1.0, 1.0}, {1.0, -1.0});
    return fm::PotentialModel(g, {{0, 1, {fm::PairFamily::GaussianWell, 0.5, 1.0}}},
                              fm::AcStarkFields(g, fm::TrigSeries::from_cos_sin(1.0, 0.0, {0.05}, {})));
}

fm::PotentialModel static_pair() {
    fm::MassGeometry g({1.0, 1.0});
    return fm::PotentialModel(g, {{0, 1, {fm::PairFamily::GaussianWell, 0.5, 1.0}}});
}

fm::Vec gaussian(const fm::ProductGrid& grid, std::size_t length) {
    fm::Vec v(length);
    for (std::size_t i = 0; i < length; ++i) {
        const double x = grid.position(i % grid.spatial_size())[0];
        v[i] = std::exp(-x * x / 4.0);
    }
    return v;
}

// One application of the full Floquet operator on the extended space.
void BM_FloquetApply(benchmark::State& state) {
    const fm::ProductGrid grid(kPeriod, 8, 64.0, static_cast<int>(state.range(0)), 1);
    const fm::FloquetHamiltonian k(grid, driven_pair());
    const auto in = gaussian(grid, grid.size());
    fm::Vec out(grid.size());
    for (auto _ : state) {
        k.full().apply(in, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_FloquetApply)->Arg(256)->Arg(1024)->Arg(4096);

// Full diagonalization: mode blocks for a static pair, dense for a driven one.
void BM_Spectrum(benchmark::State& state) {
    const bool driven = state.range(1) != 0;
    const fm::ProductGrid grid(kPeriod, 8, 32.0, static_cast<int>(state.range(0)), 1);
    const fm::FloquetHamiltonian k(grid, driven ? driven_pair() : static_pair());
    for (auto _ : state) benchmark::DoNotOptimize(fm::FloquetSpectrum::compute(k).count());
}
BENCHMARK(BM_Spectrum)->Args({128, 0})->Args({512, 0})->Args({64, 1})->Args({128, 1})->Unit(benchmark::kMillisecond);

// One period of split-step propagation.
void BM_SplitStepPeriod(benchmark::State& state) {
    const fm::ProductGrid grid(kPeriod, 8, 64.0, static_cast<int>(state.range(0)), 1);
    const auto propagator = fm::Propagator::for_model(grid, driven_pair());
    auto psi = gaussian(grid, grid.spatial_size());
    for (auto _ : state) {
        psi = propagator.propagate(psi, 0.0, kPeriod);
        benchmark::DoNotOptimize(psi.data());
    }
}
BENCHMARK(BM_SplitStepPeriod)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
