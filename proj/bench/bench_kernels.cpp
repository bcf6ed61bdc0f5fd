#include <benchmark/benchmark.h>

#include "ontolab/bellchsh.hpp"
#include "ontolab/dwigner.hpp"
#include "ontolab/kernels.hpp"
#include "ontolab/onto.hpp"

namespace {

using namespace ontolab;

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_Predict(benchmark::State& st) {
    const OntoModel model = ks_model_qubit(200000);
    const PureState psi = random_pure_state(2, 11);
    const PureState phi = random_pure_state(2, 12);
    for (auto _ : st) benchmark::DoNotOptimize(predict(model, psi, phi, exec_of(st)));
}
BENCHMARK(BM_Predict)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Wigner(benchmark::State& st) {
    const std::size_t d = 31;
    const PhasePointSet pps(d);
    const PureState psi = random_pure_state(d, 5);
    for (auto _ : st) benchmark::DoNotOptimize(wigner(psi, pps, exec_of(st)).sum());
}
BENCHMARK(BM_Wigner)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ChshGrid(benchmark::State& st) {
    const PureState psi = bell_states()[0];
    for (auto _ : st) benchmark::DoNotOptimize(chsh_grid_max(psi, 12, 0, 1, exec_of(st)).grid_value);
}
BENCHMARK(BM_ChshGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
