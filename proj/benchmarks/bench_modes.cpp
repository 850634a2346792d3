#include <random>

#include <benchmark/benchmark.h>

#include "modeplan/contact_modes.hpp"

using namespace modeplan;

namespace {

std::vector<ContactPoint> sphere_contacts(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<ContactPoint> out;
    for (int i = 0; i < n; ++i) {
        const Vec3 p = Vec3(g(rng), g(rng), g(rng)).normalized();
        out.push_back({p, -p, 0.0, 0, i});
    }
    return out;
}

std::vector<ContactPoint> cube_on_floor() {
    std::vector<ContactPoint> out;
    for (double x : {-0.05, 0.05})
        for (double y : {-0.05, 0.05}) out.push_back({Vec3(x, y, 0), Vec3::UnitZ(), 0.0, 0, static_cast<int>(out.size())});
    return out;
}

void BM_CsModesSphere(benchmark::State& state) {
    const auto grasp = build_grasp_map(sphere_contacts(static_cast<int>(state.range(0)), 3), Pose::identity());
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_cs_modes(grasp));
}
BENCHMARK(BM_CsModesSphere)->DenseRange(1, 6);

void BM_CubeFullCensus(benchmark::State& state) {
    const Pose q = Pose::from_translation(Vec3(0, 0, 0.05));
    const auto grasp = build_grasp_map(cube_on_floor(), q);
    const TangentBasis basis = TangentBasis::make(static_cast<int>(state.range(0)));
    std::size_t total = 0;
    for (auto _ : state) {
        total = 0;
        for (const auto& cs : enumerate_cs_modes(grasp)) total += enumerate_ss_modes(cs, grasp, basis).size();
        benchmark::DoNotOptimize(total);
    }
    state.counters["modes"] = static_cast<double>(total);
}
BENCHMARK(BM_CubeFullCensus)->Arg(2)->Arg(4);

}  // namespace
