#include <benchmark/benchmark.h>

#include "pattent/closed_form.hpp"
#include "pattent/exact.hpp"
#include "pattent/general_bounds.hpp"

using namespace pattent;

static void BM_ExactTernary(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(exact_pattern_entropy({0.2, 0.3, 0.5}, n));
}
BENCHMARK(BM_ExactTernary)->Arg(6)->Arg(10)->Arg(14);

static void BM_ExactUniform(benchmark::State& state) {
    const auto k = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(exact_uniform_pattern_entropy(k, 1000));
}
BENCHMARK(BM_ExactUniform)->Arg(10)->Arg(1000);

static void BM_LowerBoundPoint(benchmark::State& state) {
    const Distribution d = Distribution::geometric(0.05);
    for (auto _ : state) benchmark::DoNotOptimize(lower_bound_general(d, 1e4, 0.3, 0.5).LB);
}
BENCHMARK(BM_LowerBoundPoint);

static void BM_UpperBoundPoint(benchmark::State& state) {
    const Distribution d = Distribution::zipf(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(upper_bound_general(d, 1e4, 0.4, 0.0, 0.2, Packing::merged_bin).UB);
}
BENCHMARK(BM_UpperBoundPoint);

static void BM_GeometricRecipe(benchmark::State& state) {
    const double n = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(geometric_bounds(0.05, n, BoundMode::finite_n).LB);
}
BENCHMARK(BM_GeometricRecipe)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_GeneralOptimizer(benchmark::State& state) {
    const Distribution d = Distribution::geometric(0.8);
    ParamSearchSpec s = ParamSearchSpec::defaults(1000);
    s.jobs = 1;
    for (auto _ : state) benchmark::DoNotOptimize(optimize_lower(d, 1000, s).best.LB);
}
BENCHMARK(BM_GeneralOptimizer)->Unit(benchmark::kMillisecond);
