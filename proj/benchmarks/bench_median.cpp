// Microbenchmarks for the hot paths: the 1d trimmed interval scan, a full
// median solve, and the bucketed estimator end to end. Run with
// --benchmark_filter=... to pick one.

#include <benchmark/benchmark.h>

#include "affmed/estimators.hpp"
#include "affmed/instances.hpp"
#include "affmed/median.hpp"
#include "affmed/rng.hpp"
#include "affmed/trimmed.hpp"

namespace {

std::vector<double> gaussian_sample_1d(int n, std::uint64_t seed) {
    affmed::Rng rng(seed);
    std::vector<double> y(n);
    for (double& v : y) v = rng.normal();
    return y;
}

affmed::PointSet gaussian_points(int n, int d, std::uint64_t seed) {
    affmed::Rng rng(seed);
    affmed::Matrix pts(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) pts(i, j) = rng.normal();
    return affmed::PointSet(pts);
}

void bm_feasible_interval(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto y = gaussian_sample_1d(n, 7);
    for (auto _ : state) {
        auto iv = affmed::directional_feasible_interval(y, 1.0 / 3.0);
        benchmark::DoNotOptimize(iv);
    }
    state.SetComplexityN(n);
}

void bm_median(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int d = static_cast<int>(state.range(1));
    auto pts = gaussian_points(n, d, 11);
    affmed::MedianConfig cfg;
    cfg.seed = 3;
    for (auto _ : state) {
        auto rep = affmed::high_dim_median(pts, cfg);
        benchmark::DoNotOptimize(rep.estimate);
    }
}

void bm_estimator_ours(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int d = static_cast<int>(state.range(1));
    auto pts = gaussian_points(n, d, 13);
    affmed::EstimatorConfig cfg;
    cfg.kind = affmed::EstimatorKind::ours;
    cfg.seed = 5;
    for (auto _ : state) {
        auto res = affmed::run_estimator(pts, cfg);
        benchmark::DoNotOptimize(res.estimate);
    }
}

BENCHMARK(bm_feasible_interval)->Arg(100)->Arg(1000)->Arg(10000)->Complexity();
BENCHMARK(bm_median)->Args({60, 3})->Args({200, 5})->Args({300, 10});
BENCHMARK(bm_estimator_ours)->Args({2000, 4})->Args({8000, 8});

}  // namespace

BENCHMARK_MAIN();
