#include <cmath>
#include <random>

#include <Eigen/Core>
#include <benchmark/benchmark.h>

#include "gwquant/kernel.hpp"
#include "gwquant/quantify.hpp"
#include "gwquant/sgpr.hpp"
#include "gwquant/vhgpr.hpp"

namespace {

using namespace gwquant;

struct Data {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

Data make_data(Eigen::Index n, Eigen::Index d) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    std::normal_distribution<double> z(0.0, 0.05);
    Data data{Eigen::MatrixXd(n, d), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) data.x(i, j) = u(rng);
        data.y(i) = 0.2 * data.x(i, 0) + z(rng);
    }
    return data;
}

KernelParams unit_kernel(Eigen::Index d) { return KernelParams(0.0, Eigen::VectorXd::Zero(d)); }

void BM_KernelMatrix(benchmark::State& state) {
    const Data data = make_data(state.range(0), 3);
    const KernelParams k = unit_kernel(3);
    for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(data.x, data.x, k));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KernelMatrix)->RangeMultiplier(2)->Range(25, 400)->Complexity(benchmark::oNSquared);

void BM_SgprNlml(benchmark::State& state) {
    const Data data = make_data(state.range(0), 2);
    const KernelParams k = unit_kernel(2);
    for (auto _ : state) benchmark::DoNotOptimize(sgpr_nlml(k, std::log(0.01), data.x, data.y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SgprNlml)->RangeMultiplier(2)->Range(25, 400)->Complexity(benchmark::oNCubed);

void BM_MvBound(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    const Data data = make_data(n, 2);
    VhgprParams p;
    p.kernel_f = unit_kernel(2);
    p.kernel_g = unit_kernel(2);
    p.mu0 = std::log(0.01);
    p.variational_lambda = Eigen::VectorXd::Constant(n, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(mv_bound(p, data.x, data.y));
    state.SetComplexityN(n);
}
BENCHMARK(BM_MvBound)->RangeMultiplier(2)->Range(25, 200)->Complexity(benchmark::oNCubed);

void BM_StateProbabilities(benchmark::State& state) {
    const Data data = make_data(200, 1);
    const SgprModel model(unit_kernel(1), std::log(0.0025), data.x, data.y);
    std::vector<double> damages;
    for (int i = 0; i < state.range(0); ++i) damages.push_back(4.0 * i / static_cast<double>(state.range(0)));
    const StateGrid grid = StateGrid::damages(damages);
    for (auto _ : state) benchmark::DoNotOptimize(state_probabilities(model, grid, 0.4));
}
BENCHMARK(BM_StateProbabilities)->Arg(5)->Arg(50)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
