// Serial vs OpenMP fitting of every family over the daily instances of a
// synthetic month.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "lobrate/analysis.hpp"
#include "lobrate/synth.hpp"

using namespace lobrate;

namespace {

const std::vector<rates::Instance>& daily_instances() {
    static const std::vector<rates::Instance> out = [] {
        synth::SynthSpec spec;
        spec.seed = 7;
        spec.days = 20;
        auto all = rates::instances(synth::generate(spec).truth.tallies);
        std::erase_if(all, [](const rates::Instance& i) { return i.key.granularity != rates::Granularity::Daily; });
        return all;
    }();
    return out;
}

void BM_FitSerial(benchmark::State& state) {
    const auto& inst = daily_instances();
    for (auto _ : state) {
        benchmark::DoNotOptimize(analysis::fit_instances_serial(inst, dist::kAllFamilies, {}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inst.size()));
}

void BM_FitParallel(benchmark::State& state) {
    const auto& inst = daily_instances();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(analysis::fit_instances_parallel(inst, dist::kAllFamilies, {}, threads));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inst.size()));
}

}  // namespace

BENCHMARK(BM_FitSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
