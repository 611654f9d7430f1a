// Serial reference vs. OpenMP batch on a shortened preset.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "lewis/config.hpp"
#include "lewis/experiment.hpp"

namespace {

lewis::ExperimentConfig bench_config(const char* preset) {
    auto doc = lewis::preset_document(preset);
    doc["repetitions"] = 32;
    return lewis::parse_config(doc);
}

void BM_BatchSerial(benchmark::State& state) {
    const auto config = bench_config("exp2_3unrestricted");
    for (auto _ : state) benchmark::DoNotOptimize(lewis::run_batch_serial(config));
    state.SetItemsProcessed(state.iterations() * config.repetitions *
                            static_cast<std::int64_t>(config.phase1.episodes + config.phase2_episodes));
}
BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BatchParallel(benchmark::State& state) {
    const auto config = bench_config("exp2_3unrestricted");
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(lewis::run_batch(config, workers));
    state.SetItemsProcessed(state.iterations() * config.repetitions *
                            static_cast<std::int64_t>(config.phase1.episodes + config.phase2_episodes));
}
BENCHMARK(BM_BatchParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SingleRepetition(benchmark::State& state) {
    const auto config = bench_config("exp1_2agents");
    std::size_t rep = 0;
    for (auto _ : state) benchmark::DoNotOptimize(lewis::run_repetition(config, rep++));
}
BENCHMARK(BM_SingleRepetition)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
