#include <benchmark/benchmark.h>

#include "modeplan/planner.hpp"
#include "modeplan/task_io.hpp"

using namespace modeplan;

namespace {

void BM_PlanFixture(benchmark::State& state, const char* name) {
    Task task = load_task(std::string(MODEPLAN_TASK_DIR) + "/" + name + ".json");
    task.planner.rng_seed = 2;
    std::size_t nodes = 0;
    for (auto _ : state) {
        const PlanResult r = plan(task);
        nodes = r.stats.nodes_tree;
        benchmark::DoNotOptimize(r.success);
    }
    state.counters["nodes_tree"] = static_cast<double>(nodes);
}
BENCHMARK_CAPTURE(BM_PlanFixture, cube_drop, "cube_drop")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PlanFixture, cube_push, "cube_push")->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
