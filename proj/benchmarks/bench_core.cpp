#include "mblotto/cycle.hpp"
#include "mblotto/ensemble.hpp"
#include "mblotto/sector_basis.hpp"
#include "mblotto/spectra.hpp"

#include <benchmark/benchmark.h>

using namespace mblotto;

static void BM_BuildHamiltonian(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const auto basis = enumerate_basis(L);
    const auto dr = make_realizations(1, 1, L)[0];
    for (auto _ : state) benchmark::DoNotOptimize(build_hamiltonian(basis, dr, {1.0, 0.5, true}));
}
BENCHMARK(BM_BuildHamiltonian)->Arg(8)->Arg(10)->Arg(12);

static void BM_Diagonalize(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const bool vectors = state.range(1) != 0;
    const auto basis = enumerate_basis(L);
    const auto dr = make_realizations(1, 1, L)[0];
    const Matrix H = build_hamiltonian(basis, dr, {1.0, 1.0, true});
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(H, {vectors, 0, 1.0}));
}
BENCHMARK(BM_Diagonalize)->Args({8, 1})->Args({10, 0})->Args({10, 1})->Args({12, 0})->Unit(benchmark::kMillisecond);

static void BM_AdiabaticCycle(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const auto basis = enumerate_basis(L);
    const auto pair = EndpointPair::standard(make_realizations(1, 1, L)[0]);
    CycleParams p;
    p.wb = 0.002;
    for (auto _ : state) benchmark::DoNotOptimize(run_cycle(basis, pair, p, 0.03));
}
BENCHMARK(BM_AdiabaticCycle)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

// Cost of one diabatic time step, measured on a ramp of state.range(1) steps.
static void BM_DiabaticSteps(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const auto steps = static_cast<double>(state.range(1));
    const auto basis = enumerate_basis(L);
    const auto dr = make_realizations(1, 1, L)[0];
    const double dt = 1.0;
    const double v = (dr.h_mbl - dr.h_eth) / (steps * dt);
    for (auto _ : state)
        benchmark::DoNotOptimize(diabatic_unitary(basis, dr, {1.0, 0.0, true}, Direction::forward, v, dt));
    state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_DiabaticSteps)->Args({6, 64})->Args({8, 64})->Unit(benchmark::kMillisecond);

static void BM_SampleTrials(benchmark::State& state) {
    const auto basis = enumerate_basis(10);
    const auto pair = EndpointPair::standard(make_realizations(1, 1, 10)[0]);
    CycleParams p;
    p.wb = 0.002;
    const auto e0 = endpoint_spectrum(basis, pair, 0, p, false).energies;
    const auto e1 = endpoint_spectrum(basis, pair, 1, p, false).energies;
    RngCursor cur(CounterRng(1, 0), 0);
    for (auto _ : state) benchmark::DoNotOptimize(sample_trials(e0, e1, p, 1000, cur));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleTrials);
BENCHMARK_MAIN();
