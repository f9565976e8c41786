#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pgrid/power_flow.hpp"
#include "test_util.hpp"

using namespace pgrid;
using namespace pgrid::testutil;

namespace {

NetworkCase two_bus_reactance() {
    NetworkCase net;
    net.buses = {Bus{0, 0, 0, BusRole::Slack, 1.0}, Bus{1, 0, 0, BusRole::PQ, 1.0}};
    net.lines = {Line{0, 1, 0.0, 0.1}};
    return net;
}

} // namespace

TEST_CASE("flat profile on a shunt-free lossless network injects nothing") {
    const NetworkCase net = load_case3_lossless();
    const Admittance adm = build_admittance(net);
    OperatingPoint op;
    op.theta = Eigen::VectorXd::Zero(3);
    op.v = Eigen::VectorXd::Ones(3);
    const PowerInjection inj = injections(op, adm);
    CHECK(inj.p.lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(inj.q.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("two-bus injection against the direct formula") {
    const Admittance adm = build_admittance(two_bus_reactance());
    OperatingPoint op;
    op.theta = Eigen::VectorXd(2);
    op.theta << 0.0, -0.1;
    op.v = Eigen::VectorXd::Ones(2);
    const PowerInjection inj = injections(op, adm);
    const double expected = 10.0 * std::sin(0.1);
    CHECK(inj.p(0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(inj.p(1) == doctest::Approx(-expected).epsilon(1e-12));
}

TEST_CASE("lossless networks balance active power at any operating point") {
    const NetworkCase net = load_case3_lossless();
    const Admittance adm = build_admittance(net);
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        const OperatingPoint op = random_op(rng, 3);
        const PowerInjection inj = injections(op, adm);
        CHECK(std::abs(inj.p.sum()) < 1e-9);
    }
}

TEST_CASE("injection jacobian matches finite differences") {
    const NetworkCase net = load_case3();
    const Admittance adm = build_admittance(net);
    std::mt19937_64 rng(21);
    const OperatingPoint op = random_op(rng, 3);
    const Eigen::MatrixXd analytic = injection_jacobian(op, adm);
    const Eigen::MatrixXd fd = fd_jacobian(
        [&](const OperatingPoint& p) {
            const PowerInjection inj = injections(p, adm);
            Eigen::VectorXd out(6);
            out << inj.p, inj.q;
            return out;
        },
        op);
    CHECK((analytic - fd).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("zero loads solve flat immediately") {
    NetworkCase net = load_case3();
    net.loads.clear();
    const EquilibriumTriplet t = solve_power_flow(net);
    CHECK(t.iterations <= 1);
    CHECK(t.y_star.theta.lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((t.y_star.v.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("case3 equilibrium verified by independent residual evaluation") {
    NetworkCase net = load_case3();
    const EquilibriumTriplet t = solve_power_flow(net);
    CHECK(t.residual < 1e-10);
    CHECK(t.y_star.theta(0) == 0.0);  // slack reference

    // re-evaluate the mismatch through injections() directly
    const Admittance adm = build_admittance(net);
    const PowerInjection inj = injections(t.y_star, adm);
    CHECK(std::abs(inj.p(1) - 1.0 * net.scale) < 1e-10);   // PV bus P
    CHECK(std::abs(inj.p(2) - -1.5 * net.scale) < 1e-10);  // PQ bus P
    CHECK(std::abs(inj.q(2) - -0.1 * net.scale) < 1e-10);  // PQ bus Q
    CHECK(t.y_star.v(1) == doctest::Approx(1.0));          // PV setpoint held

    // u* layout: (-P*, then -Q*/V*)
    CHECK(t.u_star(2) == doctest::Approx(-inj.p(2)));
    CHECK(t.u_star(3 + 2) == doctest::Approx(-inj.q(2) / t.y_star.v(2)));
}

TEST_CASE("absurd loading reports NonConvergence") {
    NetworkCase net = load_case3();
    net.scale = 50.0;
    CHECK_THROWS_AS(solve_power_flow(net), NonConvergence);
}

TEST_CASE("solution invariant under bus relabeling") {
    const NetworkCase net = load_case3();
    const EquilibriumTriplet base = solve_power_flow(net);

    // relabel buses with the permutation 0->2, 1->0, 2->1
    const std::array<int, 3> perm = {2, 0, 1};
    NetworkCase shuffled;
    shuffled.scale = net.scale;
    shuffled.buses.resize(3);
    for (const Bus& b : net.buses) {
        Bus nb = b;
        nb.id = perm[b.id];
        shuffled.buses[nb.id] = nb;
    }
    for (const Line& l : net.lines)
        shuffled.lines.push_back(Line{perm[l.from], perm[l.to], l.r, l.x});
    for (const LoadSpec& l : net.loads)
        shuffled.loads.push_back(LoadSpec{perm[l.bus], l.p, l.q});
    const EquilibriumTriplet t = solve_power_flow(shuffled);

    const double slack_shift = t.y_star.theta(perm[0]);
    for (int i = 0; i < 3; ++i) {
        CHECK(t.y_star.theta(perm[i]) - slack_shift ==
              doctest::Approx(base.y_star.theta(i)).epsilon(1e-8));
        CHECK(t.y_star.v(perm[i]) == doctest::Approx(base.y_star.v(i)).epsilon(1e-8));
    }
}

TEST_CASE("shipped 39-bus cases converge across the study sweep") {
    for (const char* name : {"case39_22.json", "case39_24.json", "case39_26.json"}) {
        NetworkCase net = load_shipped(name);
        for (double s : {0.5, 1.0, 2.0}) {
            net.scale = s;
            const EquilibriumTriplet t = solve_power_flow(net);
            CHECK(t.residual < 1e-10);
            CHECK(t.y_star.v.minCoeff() > 0.7);
        }
    }
}
