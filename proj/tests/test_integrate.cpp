#include <doctest.h>

#include <cmath>

#include "pgrid/errors.hpp"
#include "pgrid/integrate.hpp"
#include "pgrid/network_energy.hpp"
#include "pgrid/system_model.hpp"
#include "test_util.hpp"

using namespace pgrid;
using namespace pgrid::testutil;

TEST_CASE("harmonic oscillator against the closed form") {
    const auto rhs = [](double, const Eigen::VectorXd& x) {
        Eigen::VectorXd dx(2);
        dx << x(1), -x(0);
        return dx;
    };
    Eigen::VectorXd x0(2);
    x0 << 1.0, 0.0;
    const Trajectory traj = integrate(rhs, x0, 0.0, 10.0, 0.5);
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        CHECK(traj.x[k](0) == doctest::Approx(std::cos(traj.t[k])).epsilon(1e-6));
        CHECK(traj.x[k](1) == doctest::Approx(-std::sin(traj.t[k])).epsilon(1e-6));
    }
}

TEST_CASE("equilibrium start stays put") {
    const NetworkCase net = load_case3();
    const SystemModel sys = SystemModel::build(net, SigmaPolicy(1.0));
    const Eigen::VectorXd xs = sys.triplet().x_star;
    const auto rhs = [&](double, const Eigen::VectorXd& x) { return sys.rhs(x); };
    const Trajectory traj = integrate(rhs, xs, 0.0, 10.0, 1.0);
    for (const Eigen::VectorXd& x : traj.x)
        CHECK((x - xs).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("small perturbation on a certified case relaxes back") {
    const NetworkCase net = load_case3();
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;
    const SystemModel sys = SystemModel::build(net, t, SigmaPolicy(-lambda + 0.8));
    std::mt19937_64 rng(12);
    const Eigen::VectorXd x0 =
        sys.triplet().x_star + random_direction(rng, sys.state_dim(), 1e-4);
    const auto rhs = [&](double, const Eigen::VectorXd& x) { return sys.rhs(x); };
    const Trajectory traj = integrate(rhs, x0, 0.0, 10.0, 10.0);
    CHECK((traj.back_state() - sys.triplet().x_star).norm() < 1e-4);
}

TEST_CASE("halving the tolerances barely moves the endpoint") {
    const NetworkCase net = load_case3();
    const SystemModel sys = SystemModel::build(net, SigmaPolicy(1.0));
    std::mt19937_64 rng(13);
    const Eigen::VectorXd x0 =
        sys.triplet().x_star + random_direction(rng, sys.state_dim(), 0.05);
    const auto rhs = [&](double, const Eigen::VectorXd& x) { return sys.rhs(x); };
    IntegratorOptions loose, tight;
    loose.rtol = 1e-8;
    loose.atol = 1e-10;
    tight.rtol = 5e-9;
    tight.atol = 5e-11;
    const Trajectory a = integrate(rhs, x0, 0.0, 5.0, 5.0, loose);
    const Trajectory b = integrate(rhs, x0, 0.0, 5.0, 5.0, tight);
    const double diff = (a.back_state() - b.back_state()).lpNorm<Eigen::Infinity>();
    CHECK(diff < 10.0 * (loose.rtol * x0.lpNorm<Eigen::Infinity>() + loose.atol));
}

TEST_CASE("event handling across a derivative discontinuity") {
    const double t_switch = 1.0 / 3.0;
    Eigen::VectorXd x0(1);
    x0 << 0.0;
    const double expected = t_switch - 2.0 * (1.0 - t_switch);

    // regime-per-segment integration (what simulate() does) is exact
    const auto rhs_a = [](double, const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, 1.0);
    };
    const auto rhs_b = [](double, const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, -2.0);
    };
    const Trajectory first = integrate(rhs_a, x0, 0.0, t_switch, t_switch);
    const Trajectory second =
        integrate(rhs_b, first.back_state(), t_switch, 1.0, 1.0);
    CHECK(std::abs(second.back_state()(0) - expected) < 1e-13);

    // in-call switching with the event declared stays error-controlled:
    // the step landing on the event cannot straddle the kink
    const auto rhs_switching = [&](double t, const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, t < t_switch ? 1.0 : -2.0);
    };
    const Trajectory traj =
        integrate(rhs_switching, x0, 0.0, 1.0, 1.0, IntegratorOptions{}, {t_switch});
    CHECK(std::abs(traj.back_state()(0) - expected) < 1e-7);
}

TEST_CASE("fixed-step mode reproduces itself bitwise") {
    const NetworkCase net = load_case3();
    const SystemModel sys = SystemModel::build(net, SigmaPolicy(0.7));
    std::mt19937_64 rng(14);
    const Eigen::VectorXd x0 =
        sys.triplet().x_star + random_direction(rng, sys.state_dim(), 0.02);
    const auto rhs = [&](double, const Eigen::VectorXd& x) { return sys.rhs(x); };
    IntegratorOptions opts;
    opts.fixed_step = 1e-3;
    const Trajectory a = integrate(rhs, x0, 0.0, 1.0, 0.1, opts);
    const Trajectory b = integrate(rhs, x0, 0.0, 1.0, 0.1, opts);
    REQUIRE(a.x.size() == b.x.size());
    for (std::size_t k = 0; k < a.x.size(); ++k)
        CHECK((a.x[k] - b.x[k]).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("finite-time domain exits surface as StepSizeUnderflow") {
    // x' = -1/(2x) reaches x = 0 at t = 1 from x(0) = 1; the rhs guards the
    // domain like the bus models do
    const auto rhs = [](double, const Eigen::VectorXd& x) {
        if (x(0) <= 0.0) throw DomainError("left the domain");
        Eigen::VectorXd dx(1);
        dx << -0.5 / x(0);
        return dx;
    };
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    CHECK_THROWS_AS(integrate(rhs, x0, 0.0, 2.0, 2.0), StepSizeUnderflow);
}
