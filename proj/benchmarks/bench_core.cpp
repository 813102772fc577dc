#include "finsler/census.hpp"
#include "finsler/homotopy.hpp"
#include "finsler/pathspace.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace finsler;

namespace {

DiscretePath product_arc(int k)
{
    const auto man = ModelManifold::circle_times_sphere(1.0);
    FlatFrame f;
    f.origin = product_point(0.0, Eigen::Vector3d::UnitX());
    f.lattice << 1.0, 0.0, 0.0, 2.0 * std::numbers::pi;
    OracleGeodesic g;
    g.frame = f;
    g.kind = ModelKind::product;
    g.flat = Eigen::Vector2d(2.0, 1.5 * std::numbers::pi);
    g.length = g.flat.norm();
    return from_oracle(man, g, k);
}

void BM_Energy(benchmark::State& st)
{
    const DiscretePath p = product_arc(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(discrete_energy(p));
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Energy)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_Gradient(benchmark::State& st)
{
    const DiscretePath p = product_arc(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(energy_gradient(p));
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Gradient)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_MorseIndex(benchmark::State& st)
{
    const DiscretePath p = product_arc(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(morse_index(p));
}
BENCHMARK(BM_MorseIndex)->Arg(16)->Arg(64)->Arg(256);

void BM_DescendTorus(benchmark::State& st)
{
    const auto man = ModelManifold::torus(Eigen::Vector2d(0.3, 0.1));
    const auto o = man.oracle_geodesics(plane_point(0.15, 0.25), plane_point(0.65, 0.4), HomotopyClass(3, -2), 1e9);
    DiscretePath start = from_oracle(man, o.front());
    for (int i = 1; i < start.k(); ++i) start.nodes[static_cast<std::size_t>(i)](0) += 0.05 * std::sin(std::numbers::pi * i / start.k());
    for (auto _ : st) benchmark::DoNotOptimize(descend(start));
}
BENCHMARK(BM_DescendTorus);

void BM_WordBall(benchmark::State& st)
{
    const GroupSpec spec = GroupSpec::parse("free_abelian", 2);
    for (auto _ : st) benchmark::DoNotOptimize(word_ball_count(spec, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_WordBall)->Arg(16)->Arg(64);

void BM_FreeWordBall(benchmark::State& st)
{
    const GroupSpec spec = GroupSpec::parse("free", 2);
    for (auto _ : st) benchmark::DoNotOptimize(word_ball_count(spec, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_FreeWordBall)->Arg(6)->Arg(9);

} // namespace
BENCHMARK_MAIN();
