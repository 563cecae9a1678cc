#include <benchmark/benchmark.h>

#include "pointcert/rng.hpp"
#include "pointcert/transforms.hpp"

using namespace pointcert;

namespace {

PointCloud make_cloud(std::size_t n) {
    Rng rng(42);
    PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        cloud.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    return cloud;
}

void BM_ApplyZTwist(benchmark::State& state) {
    const PointCloud cloud = make_cloud(static_cast<std::size_t>(state.range(0)));
    const TransformParam param = ZTwistParam{0.35};
    for (auto _ : state) benchmark::DoNotOptimize(apply_transform(param, cloud));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ApplyGeneralRotation(benchmark::State& state) {
    const PointCloud cloud = make_cloud(static_cast<std::size_t>(state.range(0)));
    const TransformParam param = GeneralRotationParam{{0, 0, 1}, 0.4};
    for (auto _ : state) benchmark::DoNotOptimize(apply_transform(param, cloud));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ComposeRotations(benchmark::State& state) {
    Rng rng(7);
    const GeneralRotationParam a{{0.6, 0.64, 0.48}, 0.9};
    const GeneralRotationParam b{{0, 0.6, 0.8}, 1.3};
    for (auto _ : state) benchmark::DoNotOptimize(compose_rotations(a, b));
}

void BM_SampleSphereGrid(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_sphere_grid(static_cast<int>(state.range(0)), 0.2));
}

} // namespace

BENCHMARK(BM_ApplyZTwist)->Arg(64)->Arg(1024);
BENCHMARK(BM_ApplyGeneralRotation)->Arg(64)->Arg(1024);
BENCHMARK(BM_ComposeRotations);
BENCHMARK(BM_SampleSphereGrid)->Arg(5)->Arg(10);
