#include <benchmark/benchmark.h>

#include "pgrid/certify.hpp"
#include "pgrid/integrate.hpp"
#include "pgrid/network_energy.hpp"
#include "pgrid/simulate.hpp"
#include "pgrid/small_signal.hpp"
#include "pgrid/system_model.hpp"

namespace {

using namespace pgrid;

NetworkCase& case39() {
    static NetworkCase net = load_case(std::string(PGRID_CASES_DIR) + "/case39_22.json");
    return net;
}

const SystemModel& system39() {
    static SystemModel sys = [] {
        NetworkCase net = case39();
        const EquilibriumTriplet t = solve_power_flow(net);
        const double lambda = network_lambda(t, net).lambda;
        return SystemModel::build(net, t, SigmaPolicy(-lambda + 0.5));
    }();
    return sys;
}

void BM_BuildAdmittance(benchmark::State& state) {
    const NetworkCase& net = case39();
    for (auto _ : state) {
        Admittance adm = build_admittance(net);
        benchmark::DoNotOptimize(adm.b.data());
    }
}
BENCHMARK(BM_BuildAdmittance);

void BM_PowerFlow(benchmark::State& state) {
    NetworkCase net = case39();
    net.scale = 1.5;
    for (auto _ : state) {
        EquilibriumTriplet t = solve_power_flow(net);
        benchmark::DoNotOptimize(t.residual);
    }
}
BENCHMARK(BM_PowerFlow);

void BM_WbHessian(benchmark::State& state) {
    const NetworkCase& net = case39();
    const Admittance adm = build_admittance(net);
    const EquilibriumTriplet t = solve_power_flow(net);
    for (auto _ : state) {
        Eigen::MatrixXd h = wb_hessian(t.y_star, adm.b);
        benchmark::DoNotOptimize(h.data());
    }
}
BENCHMARK(BM_WbHessian);

void BM_NetworkLambda(benchmark::State& state) {
    const NetworkCase& net = case39();
    const EquilibriumTriplet t = solve_power_flow(net);
    for (auto _ : state) {
        NetworkIndex idx = network_lambda(t, net);
        benchmark::DoNotOptimize(idx.lambda);
    }
}
BENCHMARK(BM_NetworkLambda);

void BM_SystemRhs(benchmark::State& state) {
    const SystemModel& sys = system39();
    const Eigen::VectorXd x = sys.triplet().x_star;
    for (auto _ : state) {
        Eigen::VectorXd dx = sys.rhs(x);
        benchmark::DoNotOptimize(dx.data());
    }
}
BENCHMARK(BM_SystemRhs);

void BM_Linearize(benchmark::State& state) {
    const SystemModel& sys = system39();
    for (auto _ : state) {
        LinearizedSystem lin = linearize(sys);
        benchmark::DoNotOptimize(lin.spectral_abscissa);
    }
}
BENCHMARK(BM_Linearize);

void BM_IntegrateSecond(benchmark::State& state) {
    const SystemModel& sys = system39();
    Eigen::VectorXd x0 = sys.triplet().x_star;
    x0(0) += 0.05;
    const auto rhs = [&](double, const Eigen::VectorXd& x) { return sys.rhs(x); };
    for (auto _ : state) {
        Trajectory traj = integrate(rhs, x0, 0.0, 1.0, 1.0);
        benchmark::DoNotOptimize(traj.x.back().data());
    }
}
BENCHMARK(BM_IntegrateSecond);

void BM_LyapunovEval(benchmark::State& state) {
    const SystemModel& sys = system39();
    const LyapunovFunction lyap = LyapunovFunction::build(sys, case39());
    Eigen::VectorXd x = sys.triplet().x_star;
    x(1) += 0.02;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lyap.eval(x));
    }
}
BENCHMARK(BM_LyapunovEval);

} // namespace

BENCHMARK_MAIN();
