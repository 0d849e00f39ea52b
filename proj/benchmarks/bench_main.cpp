#include <benchmark/benchmark.h>

#include "lenschain/cycles.hpp"
#include "lenschain/family.hpp"
#include "lenschain/scan.hpp"
#include "lenschain/shrink.hpp"
#include "lenschain/symseq.hpp"

using namespace lenschain;

namespace {

const MapFamily& fig1() {
    static const MapFamily fam = builtin_family("fig1").family();
    return fam;
}

PwaMap pentagon() {
    return PwaMap(Matrix{{0, 1, 0}, {1, 0, 1}, {28.0 / 87.0, 0, 0}},
                  Matrix{{-23.0 / 14.0, 1, 0}, {0, 0, 1}, {3.0 / 2.0, 0, 0}}, {1, 0, 0});
}

void BM_CountRotational(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(count_rotational(static_cast<int>(st.range(0))));
}
BENCHMARK(BM_CountRotational)->Arg(12)->Arg(60);

void BM_RotationalParams(benchmark::State& st) {
    const SymbolSequence s = rotational(7, 5, 17);
    for (auto _ : st) benchmark::DoNotOptimize(rotational_params(s));
}
BENCHMARK(BM_RotationalParams);

void BM_SolveCycle(benchmark::State& st) {
    const PwaMap f = fig1().at(0.2845, 0.8);
    const SymbolSequence s = rotational(3, 2, 7);
    for (auto _ : st) benchmark::DoNotOptimize(solve_cycle(f, 1.0, s));
}
BENCHMARK(BM_SolveCycle);

void BM_Eigenvalues(benchmark::State& st) {
    const std::size_t n = static_cast<std::size_t>(st.range(0));
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = 1.0 / (1.0 + i + 2.0 * j) - (i == j ? 0.3 : 0.0);
    for (auto _ : st) benchmark::DoNotOptimize(eigenvalues(m));
}
BENCHMARK(BM_Eigenvalues)->Arg(2)->Arg(4)->Arg(8);

void BM_CheckNonterminating(benchmark::State& st) {
    const PwaMap f = pentagon();
    for (auto _ : st) benchmark::DoNotOptimize(check_nonterminating(f, 1.0, 2, 2, 5));
}
BENCHMARK(BM_CheckNonterminating);

void BM_ClassifyCell(benchmark::State& st) {
    const PwaMap f = fig1().at(0.2845, 0.8);
    const ScanOptions opts;
    for (auto _ : st) benchmark::DoNotOptimize(classify_cell(f, 1.0, opts));
}
BENCHMARK(BM_ClassifyCell);

void BM_FindShrinkingPoint(benchmark::State& st) {
    const RotationalParams p = make_rotational_params(3, 2, 7);
    for (auto _ : st) benchmark::DoNotOptimize(find_shrinking_point(fig1(), p, {0.2841, 0.7583}));
}
BENCHMARK(BM_FindShrinkingPoint)->Unit(benchmark::kMillisecond);

void BM_ScanTongues(benchmark::State& st) {
    const int w = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(scan_tongues(fig1(), w, w));
}
BENCHMARK(BM_ScanTongues)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
