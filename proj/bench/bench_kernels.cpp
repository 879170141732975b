#include <benchmark/benchmark.h>
#include <svreg/design.hpp>
#include <svreg/simgen.hpp>
#include <svreg/solver.hpp>

using namespace svreg;

namespace {

Dataset setting1_data(Index n)
{
    return standardize(gen_setting1(n, 1).data).data;
}

template <class Build>
void build_design(benchmark::State& state, Build build)
{
    const auto sim = gen_setting1(state.range(0), 1);
    const auto d = standardize(sim.data).data;
    for (auto _ : state) benchmark::DoNotOptimize(build(d, sim.groups));
}

template <class Corr>
void correlations(benchmark::State& state, Corr corr)
{
    const auto sim = gen_setting1(state.range(0), 1);
    const auto d = standardize(sim.data).data;
    const auto design = serial::build_block_design(d, sim.groups);
    std::vector<Vector> out;
    for (auto _ : state) {
        corr(design, d.y, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_BuildSerial(benchmark::State& s) { build_design(s, serial::build_block_design); }
void BM_BuildOmp(benchmark::State& s) { build_design(s, omp::build_block_design); }
void BM_CorrSerial(benchmark::State& s) { correlations(s, serial::block_correlations); }
void BM_CorrOmp(benchmark::State& s) { correlations(s, omp::block_correlations); }

void BM_FitSvreg(benchmark::State& state)
{
    const auto sim = gen_setting1(100, 1);
    const auto d = setting1_data(100);
    FitConfig cfg;
    cfg.lambda = 0.1;
    for (auto _ : state) benchmark::DoNotOptimize(fit_svreg(d, sim.groups, cfg));
}

} // namespace

BENCHMARK(BM_BuildSerial)->Arg(100)->Arg(1000);
BENCHMARK(BM_BuildOmp)->Arg(100)->Arg(1000);
BENCHMARK(BM_CorrSerial)->Arg(100)->Arg(1000);
BENCHMARK(BM_CorrOmp)->Arg(100)->Arg(1000);
BENCHMARK(BM_FitSvreg)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
