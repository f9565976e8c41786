#include <doctest.h>

#include <cmath>
#include <complex>

#include "pgrid/network_energy.hpp"
#include "pgrid/small_signal.hpp"
#include "test_util.hpp"

using namespace pgrid;
using namespace pgrid::testutil;

TEST_CASE("finite-difference jacobian is step-size consistent") {
    const NetworkCase net = load_case3();
    const SystemModel sys = SystemModel::build(net, SigmaPolicy(0.9));
    const LinearizedSystem a = linearize(sys, 1e-6);
    const LinearizedSystem b = linearize(sys, 2e-6);
    CHECK((a.jacobian - b.jacobian).lpNorm<Eigen::Infinity>() < 1e-5);
    CHECK(a.spectral_abscissa == doctest::Approx(b.spectral_abscissa).epsilon(1e-6));
}

TEST_CASE("eigenvalues come in conjugate pairs") {
    const NetworkCase net = load_case3();
    const SystemModel sys = SystemModel::build(net, SigmaPolicy(0.4));
    const LinearizedSystem lin = linearize(sys);
    for (int i = 0; i < lin.eigenvalues.size(); ++i) {
        const std::complex<double> ev = lin.eigenvalues(i);
        if (std::abs(ev.imag()) < 1e-12) continue;
        bool found = false;
        for (int j = 0; j < lin.eigenvalues.size(); ++j)
            found |= std::abs(lin.eigenvalues(j) - std::conj(ev)) < 1e-8;
        CHECK(found);
    }
}

TEST_CASE("single droop against a near-ideal bus: real negative spectrum") {
    // CD at bus 1; bus 0 approximates an infinite bus with a very stiff,
    // very fast quadratic droop
    NetworkCase net;
    net.buses = {Bus{0, 0, 0, BusRole::Slack, 1.0}, Bus{1, 0, 0, BusRole::PQ, 1.0}};
    net.lines = {Line{0, 1, 0.0, 0.1}};
    DeviceSpec stiff;
    stiff.bus = 0;
    stiff.kind = DeviceKind::QD;
    stiff.droop = {1e-3, 1e-3};
    stiff.sigma = 500.0;  // enormous index: droop gains ~ 1/500, near-rigid
    DeviceSpec cd;
    cd.bus = 1;
    cd.kind = DeviceKind::CD;
    cd.droop = {1.0, 10.0};
    net.devices = {stiff, cd};

    const EquilibriumTriplet t = solve_power_flow(net);
    const SystemModel sys = SystemModel::build(net, t, SigmaPolicy(0.5));
    const LinearizedSystem lin = linearize(sys);
    for (int i = 0; i < lin.eigenvalues.size(); ++i) {
        CHECK(std::abs(lin.eigenvalues(i).imag()) < 1e-9);
        CHECK(lin.eigenvalues(i).real() < 0.0);
    }

    // closed form for the droop against a rigid neighbor at the flat,
    // unloaded operating point: the theta mode sees -(1 + D1 dP/dtheta)/tau1
    // and the V mode -(1 + D2 dQ/dV)/tau2, both partials equal to 10 here
    const auto& cdm = std::get<CdModel>(sys.models()[1]);
    const double expect_theta = -(1.0 + cdm.gains.d1 * 10.0) / cdm.par.tau1;
    const double expect_v = -(1.0 + cdm.gains.d2 * 10.0) / cdm.par.tau2;
    std::vector<double> re;
    for (int i = 0; i < lin.eigenvalues.size(); ++i)
        re.push_back(lin.eigenvalues(i).real());
    std::sort(re.begin(), re.end());
    CHECK(re[3] == doctest::Approx(expect_v).epsilon(0.05));      // slowest
    CHECK(re[2] == doctest::Approx(expect_theta).epsilon(0.05));  // next
}

TEST_CASE("certified system is Hurwitz") {
    NetworkCase net = load_case3();
    net.scale = 1.5;
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;
    const SystemModel sys = SystemModel::build(net, t, SigmaPolicy(-lambda + 0.05));
    CHECK(linearize(sys).spectral_abscissa < -1e-9);
}

TEST_CASE("exact minimal sigma never exceeds the certificate bound") {
    NetworkCase net = load_case3();
    const double lambda = network_lambda(solve_power_flow(net), net).lambda;
    const MinSigmaResult res = min_sigma_exact(net);
    CHECK(res.min_sigma <= -lambda + 1e-4);
}

TEST_CASE("search clamped at the synthesis floor reports one-sidedness") {
    // lightly loaded: the system stays Hurwitz all the way down to the
    // smallest sigma the droop-gain formulas can realize
    NetworkCase net = load_case3();
    net.scale = 0.5;
    const EquilibriumTriplet t = solve_power_flow(net);
    const MinSigmaResult res = min_sigma_exact(net);
    CHECK(res.clamped_at_floor);
    CHECK(res.min_sigma ==
          doctest::Approx(sigma_feasibility_floor(net, t) + 1e-9).epsilon(1e-6));
}

TEST_CASE("non-uniform indices above the bound keep the system Hurwitz") {
    NetworkCase net = load_case3();
    net.scale = 1.5;
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;
    Eigen::VectorXd sig(3);
    for (double a : {0.3, 1.2}) {
        for (double b : {0.3, 1.2}) {
            sig << -lambda + a, -lambda + b, -lambda + 0.01;
            const SystemModel sys = SystemModel::build(net, t, SigmaPolicy(sig));
            CHECK(linearize(sys).spectral_abscissa < -1e-9);
        }
    }
}
