#include <benchmark/benchmark.h>

#include <filesystem>

#include "hazsynth/extractor.hpp"
#include "hazsynth/model_dsl.hpp"
#include "hazsynth/search.hpp"
#include "hazsynth/simulator.hpp"

using namespace hazsynth;

namespace {

const ModelSet& scenario_model() {
    static const ModelSet m = load_model_file(std::filesystem::path(HAZSYNTH_DATA_DIR) / "models/scenario_a.des");
    return m;
}

const Supervisor& scenario_supervisor() {
    static const Supervisor sup = [] {
        const auto split = split_plant_spec(scenario_model());
        return synthesize(split.plant, split.spec);
    }();
    return sup;
}

void BM_Flatten(benchmark::State& state) {
    const auto& m = scenario_model();
    for (auto _ : state) benchmark::DoNotOptimize(flatten(m.efas));
}
BENCHMARK(BM_Flatten);

void BM_Synthesize(benchmark::State& state) {
    const auto split = split_plant_spec(scenario_model());
    for (auto _ : state) benchmark::DoNotOptimize(synthesize(split.plant, split.spec));
}
BENCHMARK(BM_Synthesize);

void BM_Extract(benchmark::State& state) {
    const auto& sup = scenario_supervisor();
    ExtractOptions o;
    o.horizon = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_unsafe(sup, o));
}
BENCHMARK(BM_Extract)->Arg(6)->Arg(10)->Arg(14);

void BM_Episode(benchmark::State& state) {
    const auto s = scenario_a_defaults();
    const std::vector<std::string> seq{"b2", "r", "t1", "u_S", "r", "t1", "t2", "d_R"};
    SimOptions o;
    o.record_samples = state.range(0) != 0;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_episode(s, seq, ++seed, o));
}
BENCHMARK(BM_Episode)->Arg(0)->Arg(1);

void BM_Mcts(benchmark::State& state) {
    const auto s = scenario_a_defaults();
    const auto run = simulator_runner(s, InfeasiblePolicy::Skip);
    const Sequence alphabet{"b0", "b1", "b2", "d_R", "d_S", "r", "t1", "t2", "u_R", "u_S"};
    MctsOptions o;
    o.budget = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mcts_search(run, alphabet, o));
}
BENCHMARK(BM_Mcts)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
