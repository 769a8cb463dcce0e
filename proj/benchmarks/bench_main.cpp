#include <benchmark/benchmark.h>

#include "anisoflow/schemes.hpp"

#include <cmath>
#include <memory>
#include <numbers>

using namespace anisoflow;

namespace {

std::shared_ptr<const MinkowskiNorm> norm_for(int family) {
    switch (family) {
        case 0: return std::make_shared<MinkowskiNorm>(MinkowskiNorm::euclidean(2));
        case 1: return std::make_shared<MinkowskiNorm>(MinkowskiNorm::randers({0.3, 0.0}));
        default: return std::make_shared<MinkowskiNorm>(MinkowskiNorm::lp_smooth(2, 4, 0.1, DerivativeMode::forward_ad));
    }
}

VecN origin() { return VecN::Zero(2); }

void BM_ComputeGeometryRadial(benchmark::State& st) {
    const auto s = ellipse_radial(norm_for(static_cast<int>(st.range(1))), origin(), 2.0, 1.0,
                                  static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(compute_geometry(s));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_ComputeGeometryRadial)->ArgsProduct({{128, 512}, {0, 1, 2}});

void BM_ComputeGeometryParametric(benchmark::State& st) {
    const auto s = ellipse_parametric(norm_for(1), origin(), 2.0, 1.0, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(compute_geometry(s));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_ComputeGeometryParametric)->Arg(128)->Arg(512);

void BM_LegendreInverse(benchmark::State& st) {
    const auto norm = norm_for(static_cast<int>(st.range(0)));
    std::vector<Covector> xs;
    for (int k = 0; k < 64; ++k) {
        const double a = 2 * std::numbers::pi * k / 64;
        VecN y(2);
        y << std::cos(a), std::sin(a);
        xs.push_back(norm->legendre(Vector(y)));
    }
    for (auto _ : st)
        for (const Covector& x : xs) benchmark::DoNotOptimize(norm->legendre_inv(x));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(BM_LegendreInverse)->Arg(0)->Arg(1)->Arg(2);

void BM_StepRadial(benchmark::State& st) {
    const auto s = ellipse_radial(norm_for(1), origin(), 2.0, 1.0, static_cast<int>(st.range(0)));
    const GeometryCache g = compute_geometry(s);
    const double dt = adaptive_dt(s, g, 0.2);
    for (auto _ : st) benchmark::DoNotOptimize(step_radial(s, dt));
}
BENCHMARK(BM_StepRadial)->Arg(128)->Arg(512);

void BM_StepParametric(benchmark::State& st) {
    const auto s = ellipse_parametric(norm_for(1), origin(), 2.0, 1.0, static_cast<int>(st.range(0)));
    const GeometryCache g = compute_geometry(s);
    const double dt = adaptive_dt(s, g, 0.2);
    for (auto _ : st) benchmark::DoNotOptimize(step_parametric(s, dt, true));
}
BENCHMARK(BM_StepParametric)->Arg(128)->Arg(512);

void BM_StepLevelSet(benchmark::State& st) {
    LevelSetParams p;
    p.dx = 1.0 / static_cast<double>(st.range(0));
    const LevelSetGrid grid = levelset_from_surface(wulff_parametric(norm_for(1), origin(), 1.0, 256), p);
    const double dt = 0.1 * p.dx * p.dx;
    for (auto _ : st) benchmark::DoNotOptimize(step_levelset(grid, dt));
}
BENCHMARK(BM_StepLevelSet)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ValidateNorm(benchmark::State& st) {
    const NormSpec spec = norm_for(2)->spec();
    for (auto _ : st) benchmark::DoNotOptimize(validate_norm(spec, 1000));
}
BENCHMARK(BM_ValidateNorm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
