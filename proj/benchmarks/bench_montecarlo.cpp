#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "rwg/montecarlo.hpp"

namespace {

rwg::CouplingSet demo_coupling(int n) {
    rwg::CouplingSet cs;
    cs.gamma = Eigen::MatrixXd::Constant(n, n, 0.5);
    for (int j = 0; j < n; ++j) cs.gamma(j, j) = -0.5 * (n - 1);
    cs.gamma_s = Eigen::MatrixXd::Zero(n, n);
    cs.gamma1 = 0.1 * Eigen::MatrixXd::Identity(n, n);
    cs.lambda = Eigen::VectorXd::LinSpaced(n, 0.1, 0.4);
    cs.lambda_s = Eigen::VectorXd::Zero(n);
    cs.kappa = Eigen::VectorXd::Zero(n);
    return cs;
}

} // namespace

static void BM_FkMeanPower(benchmark::State& state) {
    const auto cs = demo_coupling(4);
    const Eigen::VectorXd a = Eigen::VectorXd::Constant(4, 0.5);
    rwg::McConfig cfg;
    cfg.paths = state.range(0);
    cfg.seed = 9;
    for (auto _ : state) {
        auto est = rwg::fk_mean_power(cs, a, 1.0, cfg);
        benchmark::DoNotOptimize(est);
    }
}
BENCHMARK(BM_FkMeanPower)->Arg(1000)->Arg(10000);

static void BM_SdeStep(benchmark::State& state) {
    const auto cs = demo_coupling(3);
    const Eigen::VectorXd a = Eigen::VectorXd::Constant(3, 0.5);
    rwg::McConfig cfg;
    cfg.paths = 256;
    cfg.seed = 9;
    cfg.dz = 1e-2;
    cfg.z_max = 0.5;
    for (auto _ : state) {
        auto res = rwg::simulate_sde(cs, a, cfg, {0.5});
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_SdeStep);
