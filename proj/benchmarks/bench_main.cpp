#include <benchmark/benchmark.h>

#include "crowdrep/allocation.hpp"
#include "crowdrep/decision.hpp"
#include "crowdrep/harness.hpp"
#include "crowdrep/population.hpp"

namespace {

using namespace crowdrep;

ClassProfile scenario1_profile(long long budget) {
    return scenario_preset("s1").profile(budget);
}

void BM_TaskMutualInformation(benchmark::State& state) {
    const std::vector<int> d = {6, 8, 6};
    const std::vector<double> pi = {0.1, 0.2, 0.5};
    for (auto _ : state)
        benchmark::DoNotOptimize(task_mutual_information(d, pi));
}
BENCHMARK(BM_TaskMutualInformation);

void BM_TaskErrorProbability(benchmark::State& state) {
    const std::vector<int> d = {6, 8, 6};
    const std::vector<double> pi = {0.1, 0.2, 0.5};
    for (auto _ : state)
        benchmark::DoNotOptimize(task_error_probability(d, pi));
}
BENCHMARK(BM_TaskErrorProbability);

void BM_GreedyAllocate(benchmark::State& state) {
    const ClassProfile profile = scenario1_profile(state.range(0) * 100);
    for (auto _ : state)
        benchmark::DoNotOptimize(greedy_allocate(profile, ObjectiveKind::AvgMutualInfo));
}
BENCHMARK(BM_GreedyAllocate)->Arg(6)->Arg(12)->Arg(20);

void BM_Scenario1Trial(benchmark::State& state) {
    const Scenario scenario = scenario_preset("s1");
    const StrategySpec strategy = parse_strategy("greedy-mi:mp");
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_trial(scenario, strategy, 1000, ++seed));
}
BENCHMARK(BM_Scenario1Trial);

}  // namespace

BENCHMARK_MAIN();
