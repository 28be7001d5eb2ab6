#include <benchmark/benchmark.h>

#include <hawkesnet/design.hpp>
#include <hawkesnet/estimator.hpp>
#include <hawkesnet/model.hpp>
#include <hawkesnet/selection.hpp>
#include <hawkesnet/simulate.hpp>
#include <hawkesnet/spline.hpp>

using namespace hawkesnet;

static void BM_SplineEval(benchmark::State& state) {
    const SplineBasis b =
        SplineBasis::make(4, (int)state.range(0), 0.0, 10.0);
    double vals[8];
    double t = 0.0;
    for (auto _ : state) {
        t += 0.001;
        if (t > 10.0) t = 0.0;
        benchmark::DoNotOptimize(b.eval_nonzero(t, vals));
    }
}
BENCHMARK(BM_SplineEval)->Arg(4)->Arg(8)->Arg(24);

static void BM_Simulate(benchmark::State& state) {
    const ModelSpec m =
        make_preset(Preset::Setting1_2, (int)state.range(0), 10.0, 1);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(m, ++seed).total_events());
    }
}
BENCHMARK(BM_Simulate)->Arg(12)->Arg(21)->Unit(benchmark::kMillisecond);

static void BM_BuildDesign(benchmark::State& state) {
    const ModelSpec m =
        make_preset(Preset::Setting1_2, (int)state.range(0), 10.0, 1);
    const EventData ev = simulate(m, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            build_design(ev, 4, 8, 4, 4, 0.01).G.norm());
    }
}
BENCHMARK(BM_BuildDesign)->Arg(12)->Arg(21)->Unit(benchmark::kMillisecond);

static void BM_FitNode(benchmark::State& state) {
    const ModelSpec m = make_preset(Preset::Setting1_2, 21, 10.0, 1);
    const EventData ev = simulate(m, 2);
    const DesignCache d = build_design(ev, 4, 8, 4, 4, 0.01);
    const BlockFactors f(d);
    const double eta = 0.3 * eta_max(f, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_node(f, 1, eta).loss_value);
    }
}
BENCHMARK(BM_FitNode)->Unit(benchmark::kMillisecond);

static void BM_SelectEta(benchmark::State& state) {
    const ModelSpec m = make_preset(Preset::Setting1_2, 21, 10.0, 1);
    const EventData ev = simulate(m, 2);
    const DesignCache d = build_design(ev, 4, 8, 4, 4, 0.01);
    const BlockFactors f(d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_eta(f, 1).best.loss_value);
    }
}
BENCHMARK(BM_SelectEta)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
