#include "mmtdd/coverage.hpp"
#include "mmtdd/interference.hpp"
#include "mmtdd/mcsim.hpp"
#include "mmtdd/rate.hpp"

#include <benchmark/benchmark.h>

using namespace mmtdd;

namespace {

void BM_RadialKernel(benchmark::State& st)
{
    const auto p = NetworkParams::defaults();
    const auto L = tier_intensity(p, Tier::S);
    const auto w = Weight::one_minus_exp(L, 1.0);
    for (auto _ : st) {
        const auto k = radial_kernel(L, w, 1e4);
        benchmark::DoNotOptimize(k(1e7));
    }
}
BENCHMARK(BM_RadialKernel);

void BM_ExactUlKernel(benchmark::State& st)
{
    const auto p = NetworkParams::defaults();
    const double r_excl[2] = {40.0, 90.0};
    for (auto _ : st) {
        const auto k = exact_ul_kernel(p, p.lambda_m, 70.0, r_excl);
        benchmark::DoNotOptimize(k(1e7));
    }
}
BENCHMARK(BM_ExactUlKernel);

// Cold engine: every shot table is built.
void BM_CoverageCurveCold(benchmark::State& st)
{
    auto p = NetworkParams::defaults();
    p.access_scheme = st.range(0) ? AccessScheme::Dynamic : AccessScheme::Static;
    for (auto _ : st) {
        const CoverageEngine eng(p, ModelOptions{});
        benchmark::DoNotOptimize(eng.curve(Link::ULAccess, 1, std::nullopt).coverage.data());
    }
}
BENCHMARK(BM_CoverageCurveCold)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MeanRateWarm(benchmark::State& st)
{
    auto p = NetworkParams::defaults();
    p.F = 10;
    p.backhaul_scheme = BackhaulScheme::UAB;
    auto cache = std::make_shared<KTableCache>();
    mean_rate(p, ModelOptions{}, cache);
    for (auto _ : st) benchmark::DoNotOptimize(mean_rate(p, ModelOptions{}, cache).R_overall);
}
BENCHMARK(BM_MeanRateWarm)->Unit(benchmark::kMillisecond);

void BM_McDrop(benchmark::State& st)
{
    const auto p = NetworkParams::defaults();
    McConfig c;
    c.drops = 1;
    c.parallelism = 1;
    std::uint64_t seed = 0;
    for (auto _ : st) {
        c.seed = ++seed;
        benchmark::DoNotOptimize(run_mc(p, c).R_overall.mean);
    }
}
BENCHMARK(BM_McDrop)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
