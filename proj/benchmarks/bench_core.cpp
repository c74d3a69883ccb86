#include <benchmark/benchmark.h>

#include "mixlasso/harness.hpp"

using namespace mixlasso;

namespace {

ExperimentConfig reference(int n, int p) {
    ExperimentConfig c;
    c.spec.n = n;
    c.spec.p = p;
    return c;
}

}  // namespace

static void BM_SpectralNorm(benchmark::State& state) {
    Rng rng(1);
    const int n = static_cast<int>(state.range(0));
    Matrix m(n, 10 * n);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(spectral_norm(m).operator_norm);
}
BENCHMARK(BM_SpectralNorm)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_SampleDesign(benchmark::State& state) {
    const ExperimentConfig c = reference(200, static_cast<int>(state.range(0)));
    const CenterMatrix centers = make_centers(c);
    Rng rng(7);
    for (auto _ : state) benchmark::DoNotOptimize(sample_design(c.spec, centers, rng).X.data());
}
BENCHMARK(BM_SampleDesign)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_SolveLasso(benchmark::State& state) {
    const ExperimentConfig c = reference(200, static_cast<int>(state.range(0)));
    const TrialArtifacts a = draw_trial(c, 0);
    const double lambda = default_lambda(c.sigma, c.params.alpha, c.spec.p);
    for (auto _ : state) benchmark::DoNotOptimize(solve_lasso(a.instance.X, a.truth.y, lambda).objective);
}
BENCHMARK(BM_SolveLasso)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

// One full trial on the reference configuration: draw, solve, event and assumption checks.
static void BM_RunTrial(benchmark::State& state) {
    const ExperimentConfig c = reference(200, 2000);
    const CenterMatrix centers = make_centers(c);
    long i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_trial(c, i++, &centers).prediction_error);
}
BENCHMARK(BM_RunTrial)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
