#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "rwg/moments.hpp"

namespace {

Eigen::MatrixXd random_generator(int n, unsigned seed) {
    std::srand(seed);
    Eigen::MatrixXd g = Eigen::MatrixXd::Random(n, n).cwiseAbs();
    g = 0.5 * (g + g.transpose());
    for (int j = 0; j < n; ++j) g(j, j) = -(g.row(j).sum() - g(j, j));
    return g;
}

} // namespace

static void BM_TriangleAssembly(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXd g = random_generator(n, 1);
    const Eigen::VectorXd lam = Eigen::VectorXd::LinSpaced(n, 0.1, 0.5);
    for (auto _ : state) {
        auto op = rwg::assemble_triangle(g, lam);
        benchmark::DoNotOptimize(op);
    }
}
BENCHMARK(BM_TriangleAssembly)->Arg(8)->Arg(16)->Arg(32);

static void BM_PropagateSecond(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXd g = random_generator(n, 1);
    const Eigen::VectorXd lam = Eigen::VectorXd::LinSpaced(n, 0.1, 0.5);
    const auto op = rwg::assemble_triangle(g, lam);
    const Eigen::VectorXd s0 = Eigen::VectorXd::Ones(op.idx.size());
    for (auto _ : state) {
        auto s = rwg::propagate_second(op, s0, 1.0);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_PropagateSecond)->Arg(8)->Arg(16)->Arg(32);
