#include <benchmark/benchmark.h>

#include <random>

#include "cascade/experiments.hpp"

using namespace cascade;

namespace {

SpectralField random_field(const GridSpec& g) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    SpectralField u(g);
    for (Complex& c : u.coeffs()) c = Complex(n(rng), n(rng));
    return u;
}

// O(N^n D^n) basis sum, the reference for the tabulated transform
PhysicalField direct_sum(const SpectralField& u) {
    const GridSpec& g = u.grid();
    PhysicalField p(g);
    std::vector<double> x(static_cast<std::size_t>(g.dim()));
    for (std::size_t j = 0; j < g.lattice_size(); ++j) {
        std::size_t rest = j;
        for (int k = g.dim() - 1; k >= 0; --k) {
            x[static_cast<std::size_t>(k)] = g.lattice_point(static_cast<int>(rest % static_cast<std::size_t>(g.points())) + 1);
            rest /= static_cast<std::size_t>(g.points());
        }
        Complex acc = 0.0;
        for (std::size_t r = 0; r < g.mode_count(); ++r) acc += u[r] * basis_eval(g.mode_of(r), x);
        p[j] = acc;
    }
    return p;
}

GridSpec grid_for(const benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int D = static_cast<int>(state.range(1));
    return GridSpec(n, 2 * D, D);
}

void BM_FastTransform(benchmark::State& state) {
    const GridSpec g = grid_for(state);
    const SineTransform tr(g);
    const SpectralField u = random_field(g);
    PhysicalField p(g);
    for (auto _ : state) {
        tr.to_physical(u, p);
        benchmark::DoNotOptimize(p.values().data());
    }
}

void BM_DirectSum(benchmark::State& state) {
    const GridSpec g = grid_for(state);
    const SpectralField u = random_field(g);
    for (auto _ : state) benchmark::DoNotOptimize(direct_sum(u));
}

EnsembleTask ensemble_task(std::size_t members) {
    const GridSpec g(1, 64, 32);
    EnsembleTask t;
    t.spec = NoiseSpec::parse(g, "band:1,1,1");
    t.params.nu = 0.1;
    t.params.dt = 0.01;
    t.params.T = 2.0;
    t.params.record_every = 10;
    t.params.seed = 7;
    t.members = members;
    t.u0 = policy_initial(g, t.params.nu, InitialConstraint{});
    return t;
}

void BM_Ensemble(benchmark::State& state, Execution mode) {
    const EnsembleTask t = ensemble_task(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(t, mode));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_FastTransform)->Args({1, 32})->Args({1, 128})->Args({2, 16})->Args({3, 8});
BENCHMARK(BM_DirectSum)->Args({1, 32})->Args({1, 128})->Args({2, 16})->Args({3, 8});
BENCHMARK_CAPTURE(BM_Ensemble, serial, Execution::serial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Ensemble, parallel, Execution::parallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
