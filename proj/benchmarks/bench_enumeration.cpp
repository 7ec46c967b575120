#include <random>

#include <benchmark/benchmark.h>

#include "affinelens/analysis.hpp"
#include "affinelens/enumerator.hpp"
#include "affinelens/lp.hpp"
#include "affinelens/polytope.hpp"

using namespace affinelens;

namespace {

Network mlp(int d0, const std::vector<int>& widths, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto mat = [&](int r, int c, double h) {
        Eigen::MatrixXd m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
                m(i, j) = h * u(rng);
        return m;
    };
    std::vector<LayerSpec> ops;
    int in = d0;
    for (int w : widths) {
        ops.push_back(LayerSpec::dense(mat(w, in, 1.0), mat(w, 1, 0.5).col(0)));
        ops.push_back(LayerSpec::relu());
        in = w;
    }
    ops.push_back(LayerSpec::dense(mat(2, in, 1.0), mat(2, 1, 0.5).col(0)));
    return Network(d0, std::move(ops));
}

HPolytope random_cell(int d, int extra, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    HPolytope p = HPolytope::box(d);
    for (int i = 0; i < extra; ++i) {
        Eigen::VectorXd n(d);
        for (int j = 0; j < d; ++j)
            n(j) = g(rng);
        p.append(Halfspace{n.normalized(), 0.6});
    }
    return p;
}

void BM_ChebyshevCenter(benchmark::State& state)
{
    const int d = static_cast<int>(state.range(0));
    const HPolytope p = random_cell(d, static_cast<int>(state.range(1)), 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(chebyshev_center(p));
}
BENCHMARK(BM_ChebyshevCenter)->Args({2, 16})->Args({2, 64})->Args({8, 64})->Args({32, 128});

void BM_RemoveRedundant(benchmark::State& state)
{
    const HPolytope p = random_cell(2, static_cast<int>(state.range(0)), 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(remove_redundant(p));
}
BENCHMARK(BM_RemoveRedundant)->Arg(16)->Arg(64);

void BM_FindCpas(benchmark::State& state)
{
    std::vector<int> widths(static_cast<std::size_t>(state.range(1)), static_cast<int>(state.range(0)));
    const Network net = mlp(2, widths, 16);
    EnumerationOptions opt;
    opt.workers = static_cast<int>(state.range(2));
    std::size_t regions = 0;
    for (auto _ : state)
        regions = find_cpas(net, HPolytope::box(2), std::nullopt, opt).regions.size();
    state.counters["regions"] = static_cast<double>(regions);
}
BENCHMARK(BM_FindCpas)
    ->Args({16, 1, 1})
    ->Args({32, 1, 1})
    ->Args({16, 2, 1})
    ->Args({16, 3, 1})
    ->Args({16, 3, 4})
    ->Unit(benchmark::kMillisecond);

void BM_RenderSvg(benchmark::State& state)
{
    const Network net = mlp(2, {16, 16}, 21);
    const auto labeled = label_regions(net, find_cpas(net, HPolytope::box(2)));
    RenderSpec spec;
    spec.mode = RenderMode::boundary_band;
    spec.band = 0.05;
    for (auto _ : state)
        benchmark::DoNotOptimize(render_svg_2d(labeled, spec));
}
BENCHMARK(BM_RenderSvg)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
