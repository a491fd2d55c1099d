#include "imlambda/calibration.hpp"
#include "imlambda/dressed.hpp"
#include "imlambda/spectrum.hpp"
#include "imlambda/steady_state.hpp"
#include "imlambda/units.hpp"

#include <benchmark/benchmark.h>

using namespace imlambda;

namespace {

const double kDelta = -kTwoPi * 64e6;

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_SweepReflection(benchmark::State& state) {
    const DeviceModel d = reference_device();
    ReflectionGrid g;
    for (int k = 0; k < 101; ++k) g.omega_p.push_back(kTwoPi * (10.55e9 + k * 2e6));
    for (int k = 0; k < 21; ++k) g.P_d_dbm.push_back(-95.0 + 1.25 * k);
    for (auto _ : state) {
        auto m = sweep_reflection(d, kDelta, g, dbm_to_watts(-146.2), {3, mode(state)});
        benchmark::DoNotOptimize(m.r.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.omega_p.size() * g.P_d_dbm.size()));
}

void BM_ResolventSpectrum(benchmark::State& state) {
    const DeviceModel d = reference_device();
    const DriveSpec drive = d.drive(kDelta, dbm_to_watts(-83.32));
    const DressedPoint p = dress(d, drive);
    const CoefficientTensors c = build_coefficients(p.basis, p.rates);
    const ProbeSpec probe{kTwoPi * 10.6843e9, dbm_to_watts(-146.2)};
    const HarmonicState s = solve_harmonics(c, probe, drive, 3);
    const auto omega = default_spectrum_grid(p.basis, drive);
    SpectrumOptions o;
    o.execution = mode(state);
    for (auto _ : state) {
        auto tr = regression_spectrum(s, p.rates, c, probe, drive, omega, o);
        benchmark::DoNotOptimize(tr.S.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(omega.size()));
}

void BM_Backbone(benchmark::State& state) {
    const NetworkModel m;
    BackboneOptions o;
    o.n_delta = 40;
    o.execution = mode(state);
    for (auto _ : state) {
        auto bb = backbone(m, o);
        benchmark::DoNotOptimize(bb.points.data());
    }
    state.SetItemsProcessed(state.iterations() * o.n_delta);
}

} // namespace

BENCHMARK(BM_SweepReflection)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResolventSpectrum)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Backbone)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
