// Batch runner throughput: OpenMP fan-out versus the serial reference.

#include <benchmark/benchmark.h>

#include <string>

#include "manet/suite.hpp"

#ifndef MANET_SCENARIO_DIR
#error "MANET_SCENARIO_DIR must be defined"
#endif

namespace {

std::vector<manet::suite::RunSpec> specs(int seeds) {
    std::vector<manet::ScenarioError> errs;
    auto s = manet::load_scenario(std::string(MANET_SCENARIO_DIR) + "/normal.scn", errs);
    std::vector<std::uint64_t> list;
    for (int i = 1; i <= seeds; ++i) list.push_back(static_cast<std::uint64_t>(i));
    return manet::suite::expand({s}, {manet::Protocol::Aodv, manet::Protocol::AodvSec}, list);
}

void BM_Serial(benchmark::State& state) {
    const auto batch = specs(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(manet::suite::run_batch_serial(batch));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}

void BM_Parallel(benchmark::State& state) {
    const auto batch = specs(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(manet::suite::run_batch(batch));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}

void BM_SingleRun(benchmark::State& state) {
    const auto batch = specs(1);
    for (auto _ : state) benchmark::DoNotOptimize(manet::sim::run(batch[1].scenario));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SingleRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
