#include <benchmark/benchmark.h>

#include "oscphase/hierppv.hpp"
#include "support/fixtures.hpp"

using namespace oscphase;

namespace {

CoupledPhaseSystem make_network(int n) {
    return n <= 2 ? fixtures::make_pair(0.1) : fixtures::make_ring(n, 0.1);
}

static void BM_WaveformEval(benchmark::State& state) {
    PeriodicWaveform w = fixtures::pair_ppv(static_cast<int>(state.range(0)));
    Eigen::VectorXd out(2);
    double theta = 0.0;
    for (auto _ : state) {
        w.eval_into(theta, out);
        theta += 0.0137;
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_WaveformEval)->Arg(32)->Arg(128)->Arg(512);

static void BM_CpsRhs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    CoupledPhaseSystem cps = make_network(n);
    Eigen::VectorXd phi = Eigen::VectorXd::LinSpaced(n, 0.0, 0.3);
    Eigen::VectorXd out(n);
    double t = 0.0;
    for (auto _ : state) {
        cps.rhs(t, phi, out);
        t += 0.01;
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_CpsRhs)->Arg(2)->Arg(8)->Arg(16)->Arg(64);

static void BM_SimulateCpsPeriod(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    CoupledPhaseSystem cps = make_network(n);
    Eigen::VectorXd phi0 = Eigen::VectorXd::Zero(n);
    OdeOptions opts;
    for (auto _ : state) {
        CpsTrajectory tr = cps.simulate(phi0, 0.0, 1.0, opts, {}, 8);
        benchmark::DoNotOptimize(tr.phi.data());
    }
}
BENCHMARK(BM_SimulateCpsPeriod)->Arg(2)->Arg(16)->Unit(benchmark::kMicrosecond);

static void BM_FindLockPair(benchmark::State& state) {
    CoupledPhaseSystem cps = fixtures::make_detuned_pair(0.02, 0.1);
    for (auto _ : state) {
        LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d(0.0, 0.03));
        benchmark::DoNotOptimize(sol.f_star);
    }
}
BENCHMARK(BM_FindLockPair)->Unit(benchmark::kMillisecond);

static void BM_GroupRhs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    CoupledPhaseSystem cps = make_network(n);
    LockedSolution sol = find_lock(cps, 1.0, Eigen::VectorXd::Zero(n));
    FloquetData fd = floquet_analyze(cps, sol);
    GroupPPVModel gm = build_group_model(cps, sol, fd);
    std::map<int, InputSignal> in;
    InputSignal sig(2);
    sig.add_constant(1e-3, 1);
    in.emplace(0, sig);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(group_rhs(gm, in, t, 0.0));
        t += 0.01;
    }
}
BENCHMARK(BM_GroupRhs)->Arg(2)->Arg(16);

} // namespace

BENCHMARK_MAIN();
