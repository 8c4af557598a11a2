#include <benchmark/benchmark.h>

#include <cmath>

#include "lumen/envelope.hpp"
#include "lumen/solver.hpp"
#include "lumen/validate.hpp"

using namespace lumen;

namespace {

TargetMeasure desk_target()
{
    return TargetMeasure::points({{0.05, 0.02, -0.8}, {0.6, 0.0, -0.8}, {-0.45, 0.35, -0.8}, {-0.1, -0.55, -0.8},
                                  {0.2, 0.5, -0.8}},
                                 {0.02, 0.045, 0.05, 0.04, 0.05});
}

void BM_GridBuild(benchmark::State& state)
{
    const Domain d = Domain::cap({0.0, 0.0, 1.0}, M_PI / 3.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(SphericalGrid::build(d, static_cast<std::size_t>(state.range(0))).size());
}
BENCHMARK(BM_GridBuild)->Arg(5'000)->Arg(20'000)->Unit(benchmark::kMillisecond);

void BM_ReflectorMeasure(benchmark::State& state)
{
    const SphericalGrid grid = SphericalGrid::build(Domain::hemisphere({0.0, 0.0, 1.0}), 20'000);
    const SampledIntensity f = sample(IntensityField::constant(1.0), grid);
    const TargetMeasure t = desk_target();
    const Reflector r = Reflector::near(t.locations(), std::vector<double>(t.size(), 3.3));
    const WeightModel w = WeightModel::inverse_square();
    for (auto _ : state)
        benchmark::DoNotOptimize(reflector_measure(r, grid, f, w).total);
}
BENCHMARK(BM_ReflectorMeasure)->Unit(benchmark::kMillisecond);

void BM_SolveDesk(benchmark::State& state)
{
    const SphericalGrid grid = SphericalGrid::build(Domain::hemisphere({0.0, 0.0, 1.0}), 20'000);
    const SampledIntensity f = sample(IntensityField::constant(1.0), grid);
    const TargetMeasure t = desk_target();
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_discrete(grid, f, t, SolverConfig{}).max_residual);
}
BENCHMARK(BM_SolveDesk)->Unit(benchmark::kMillisecond);

void BM_Raytrace(benchmark::State& state)
{
    const TargetMeasure t = desk_target();
    const Reflector r = Reflector::near(t.locations(), {3.125, 3.33, 3.34, 3.35, 3.31});
    const Domain d = Domain::hemisphere({0.0, 0.0, 1.0});
    RayTraceOptions o;
    o.rays = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            raytrace(r, d, IntensityField::constant(1.0), WeightModel::inverse_square(), t.max_distance(), o).accepted);
}
BENCHMARK(BM_Raytrace)->Arg(100'000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
