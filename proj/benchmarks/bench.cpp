#include <benchmark/benchmark.h>

#include <vector>

#include "uranex/cascade.hpp"
#include "uranex/nmpc.hpp"
#include "uranex/qp.hpp"
#include "uranex/steady_state.hpp"

using namespace uranex;

namespace {

const FlowSheet& reference()
{
    static const FlowSheet fs = load_flowsheet(URANEX_REFERENCE_CONFIG);
    return fs;
}

const SetPoint& nominal()
{
    static const SetPoint sp = critical_setpoint(reference().O_E_nominal, reference(), reference().u_min,
                                                 reference().u_max);
    return sp;
}

const CascadeState& startup()
{
    static const CascadeState x = [] {
        FlowSheet blank = reference();
        blank.U_feed = 0.0;
        return steady_state(nominal().u_set, blank.O_E_nominal, blank).x_ss;
    }();
    return x;
}

OcpSpec spec_from(const CascadeState& x)
{
    const auto& fs = reference();
    OcpSpec s;
    s.x_k = x;
    s.u_prev = nominal().u_set;
    s.setpoint = nominal();
    s.p_hat = fs.O_E_nominal;
    s.weights = MpcWeights::standard(static_cast<int>(x.size()), nominal().u_set);
    s.bounds = InputBounds::from(fs);
    s.raffinate_tol = fs.raffinate_tol;
    return s;
}

}  // namespace

static void BM_Equilibrium(benchmark::State& state)
{
    double u = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_equilibrium({u, 2.0}, 1.1, 10.0, 0.2));
        u += 1e-9;
    }
}
BENCHMARK(BM_Equilibrium);

static void BM_Rhs(benchmark::State& state)
{
    const auto& x = nominal().x_set;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rhs(x, {nominal().u_set, nominal().p}, reference()));
    }
}
BENCHMARK(BM_Rhs);

static void BM_ControlStep(benchmark::State& state)
{
    for (auto _ : state) {
        benchmark::DoNotOptimize(step(startup(), {nominal().u_set, nominal().p}, reference(), 0.5, 1e-3));
    }
}
BENCHMARK(BM_ControlStep)->Unit(benchmark::kMillisecond);

static void BM_SteadyStateWarm(benchmark::State& state)
{
    const auto& fs = reference();
    for (auto _ : state) {
        benchmark::DoNotOptimize(steady_state(1.01 * nominal().u_set, fs.O_E_nominal, fs, nominal().x_set));
    }
}
BENCHMARK(BM_SteadyStateWarm)->Unit(benchmark::kMillisecond);

static void BM_ShootingWithSensitivities(benchmark::State& state)
{
    const auto prob = build_ocp(spec_from(startup()), reference());
    const std::vector<double> u(10, nominal().u_set);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prob.evaluate(u, true));
    }
}
BENCHMARK(BM_ShootingWithSensitivities)->Unit(benchmark::kMillisecond);

static void BM_SolveOcpStartup(benchmark::State& state)
{
    const auto prob = build_ocp(spec_from(startup()), reference());
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_ocp(prob));
    }
}
BENCHMARK(BM_SolveOcpStartup)->Unit(benchmark::kMillisecond);

static void BM_Qp(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    Eigen::MatrixXd G(2 * n, n);
    G << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
    const DenseQp qp{Eigen::MatrixXd::Identity(n, n) * 2.0, -Eigen::VectorXd::LinSpaced(n, -3.0, 3.0), G,
                     Eigen::VectorXd::Ones(2 * n)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_qp(qp, Eigen::VectorXd::Zero(n)));
    }
}
BENCHMARK(BM_Qp)->Arg(10)->Arg(20);
BENCHMARK_MAIN();
