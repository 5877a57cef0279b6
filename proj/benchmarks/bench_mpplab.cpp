#include <benchmark/benchmark.h>
#include <mpplab/calculus.hpp>
#include <mpplab/experiment.hpp>
#include <mpplab/merge.hpp>
#include <mpplab/models.hpp>
#include <mpplab/representation.hpp>
#include <mpplab/rng.hpp>

#include <string>
#include <vector>

using namespace mpplab;

namespace {

const char* const kModels[] = {
    R"({"kind":"poisson","horizon":2,"rates":{"a":1,"b":0.5}})",
    R"({"kind":"ctmc","horizon":2,"states":["x","y","z"],"generator":[[-1.5,1.5,0],[0,-0.7,0.7],[2,0,-2]]})",
    R"({"kind":"grid_bernoulli","horizon":2,"grid":[0.5,1,1.5],"probs":{"a":[0.3,0,0.5],"b":[0,0.6,0]}})",
    R"({"kind":"common_shock","horizon":2,"components":[{"1":0.8,"2":0.3},{"1":0.6}],"shock":{"rate":0.5,"marks":["2","1"]}})",
    R"({"kind":"product","components":[{"kind":"poisson","horizon":2,"rates":{"1":1}},
        {"kind":"grid_bernoulli","horizon":2,"grid":[1],"probs":{"5":0.4}}]})",
};
const char* const kNames[] = {"poisson", "ctmc", "grid_bernoulli", "common_shock", "product"};

void BM_Simulate(benchmark::State& state)
{
    const Model model(parse_model_spec(kModels[state.range(0)]));
    state.SetLabel(kNames[state.range(0)]);
    std::uint64_t r = 0;
    for (auto _ : state) {
        StreamRng rng(1, r++);
        benchmark::DoNotOptimize(model.simulate(rng));
    }
}
BENCHMARK(BM_Simulate)->DenseRange(0, 4);

void BM_Merge(benchmark::State& state)
{
    PoissonSpec spec;
    spec.rates = {{"a", static_cast<double>(state.range(0))}, {"b", 1.0}};
    spec.horizon = 10.0;
    const Model model(spec);
    std::vector<Trajectory> comps;
    for (std::uint64_t i = 0; i < 3; ++i) {
        StreamRng rng(2, i);
        comps.push_back(model.simulate(rng).trajectory);
    }
    const auto space = merged_mark_space(std::vector<MarkSpacePtr>(3, model.mark_space()));
    for (auto _ : state) benchmark::DoNotOptimize(merge(comps, space));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 3 * state.range(0) * 10);
}
BENCHMARK(BM_Merge)->Arg(1)->Arg(10)->Arg(100);

void BM_ValueFunctionSolve(benchmark::State& state)
{
    const auto spec = CtmcSpec::birth_chain(1.5, static_cast<std::size_t>(state.range(0)), 2.0);
    const auto payoff = parse_payoff("linear", spec);
    for (auto _ : state) benchmark::DoNotOptimize(ValueFunction::solve(spec, payoff, 2.0));
}
BENCHMARK(BM_ValueFunctionSolve)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_RepresentationPath(benchmark::State& state)
{
    CtmcSpec spec;
    spec.states = {"1", "2", "3"};
    spec.generator = {{-1.5, 1.5, 0}, {0, -0.7, 0.7}, {2, 0, -2}};
    spec.horizon = 2.0;
    const CtmcModel chain(spec);
    const double f[] = {1.0, -2.0, 0.5};
    const auto u = ValueFunction::solve(spec, f, 2.0);
    std::uint64_t r = 0;
    for (auto _ : state) {
        StreamRng rng(3, r++);
        benchmark::DoNotOptimize(verify_representation_path(u, chain, chain.simulate(rng), 100));
    }
}
BENCHMARK(BM_RepresentationPath)->Unit(benchmark::kMicrosecond);

void BM_MartingaleTest(benchmark::State& state)
{
    auto config = parse_experiment_config(std::string(R"({"kind":"martingale-test","replications":10000,"model":)") +
                                          kModels[state.range(0)] + "}");
    state.SetLabel(kNames[state.range(0)]);
    for (auto _ : state) benchmark::DoNotOptimize(run(config));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 10000);
}
BENCHMARK(BM_MartingaleTest)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_ReportCsv(benchmark::State& state)
{
    ExperimentReport rep;
    rep.config.models.push_back(PoissonSpec{{{"a", 1.0}}, 1.0});
    for (int i = 0; i < state.range(0); ++i) rep.checks.push_back({"check" + std::to_string(i), i * 0.1, 1.0, true, ""});
    for (auto _ : state) benchmark::DoNotOptimize(report_to_csv(rep));
}
BENCHMARK(BM_ReportCsv)->Arg(1000)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
