#include "contexture/context.hpp"
#include "contexture/objectives.hpp"
#include "contexture/spectral.hpp"
#include "contexture/verify.hpp"

#include <benchmark/benchmark.h>

namespace ct = contexture;

static void BM_ContextureSvd(benchmark::State& state) {
    const auto n = static_cast<ct::Index>(state.range(0));
    ct::Rng rng(1);
    const ct::FiniteContext ctx = ct::random_dense_context(n, n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(ct::contexture_svd(ctx).singular_values.data());
}
BENCHMARK(BM_ContextureSvd)->Arg(50)->Arg(100)->Arg(200)->Arg(400);

static void BM_KnnContext(benchmark::State& state) {
    const auto n = static_cast<ct::Index>(state.range(0));
    ct::Rng rng(2);
    const ct::PointSet pts{ct::random_normal(n, 10, rng), std::nullopt};
    const auto uni = ct::DiscreteDistribution::uniform(n);
    for (auto _ : state) benchmark::DoNotOptimize(ct::build_knn_context(pts, 10, uni).n_context());
}
BENCHMARK(BM_KnnContext)->Arg(100)->Arg(400);

static void BM_RbfContext(benchmark::State& state) {
    const auto n = static_cast<ct::Index>(state.range(0));
    ct::Rng rng(3);
    const ct::PointSet pts{ct::random_normal(n, 10, rng), std::nullopt};
    const auto uni = ct::DiscreteDistribution::uniform(n);
    for (auto _ : state) benchmark::DoNotOptimize(ct::build_rbf_context(pts, 0.1, uni).n_context());
}
BENCHMARK(BM_RbfContext)->Arg(100)->Arg(400);

static void BM_VariationalSolve(benchmark::State& state) {
    const auto kind = static_cast<ct::ObjectiveKind>(state.range(0));
    ct::Rng rng(4);
    const ct::FiniteContext ctx = kind == ct::ObjectiveKind::node_embedding ? ct::random_graph_context(30, rng)
                                                                            : ct::random_dense_context(30, 25, rng);
    ct::VariationalOptions opts;
    opts.seed = 5;
    for (auto _ : state) benchmark::DoNotOptimize(ct::solve_variational(kind, ctx, 3, opts).iterations);
    state.SetLabel(ct::to_string(kind));
}
BENCHMARK(BM_VariationalSolve)->DenseRange(0, 8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
