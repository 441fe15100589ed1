#include <benchmark/benchmark.h>

#include "rwg/waveguide.hpp"

static void BM_SolveDispersion(benchmark::State& state) {
    rwg::WaveguideSpec spec;
    spec.n = 1.7;
    spec.d = 1.0;
    spec.k = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto modes = rwg::solve_dispersion(spec);
        benchmark::DoNotOptimize(modes);
    }
}
BENCHMARK(BM_SolveDispersion)->Arg(10)->Arg(40)->Arg(100);

static void BM_ModeEval(benchmark::State& state) {
    rwg::WaveguideSpec spec;
    spec.n = 1.7;
    spec.k = 40.0;
    rwg::ModeBasis basis(spec);
    double x = -2.0;
    for (auto _ : state) {
        for (int j = 0; j < basis.size(); ++j)
            benchmark::DoNotOptimize(basis.eval(j, x));
        x = x < 2.0 ? x + 1e-3 : -2.0;
    }
}
BENCHMARK(BM_ModeEval);
