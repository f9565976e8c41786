#include <doctest.h>

#include <cmath>

#include "pgrid/certify.hpp"
#include "pgrid/integrate.hpp"
#include "pgrid/simulate.hpp"
#include "pgrid/small_signal.hpp"
#include "test_util.hpp"

using namespace pgrid;
using namespace pgrid::testutil;

TEST_CASE("certificate margins are definitional") {
    const NetworkCase net = load_case3();
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;

    const Certificate ok = certify(net, t, Eigen::VectorXd::Constant(3, -lambda + 1.0));
    CHECK(ok.certified);
    CHECK(ok.violators.empty());
    for (int i = 0; i < 3; ++i) CHECK(ok.per_bus_margin(i) == doctest::Approx(1.0));

    Eigen::VectorXd sig = Eigen::VectorXd::Constant(3, -lambda + 1.0);
    sig(2) = -lambda - 0.1;
    const Certificate bad = certify(net, t, sig);
    CHECK_FALSE(bad.certified);
    REQUIRE(bad.violators.size() == 1);
    CHECK(bad.violators[0] == 2);
}

TEST_CASE("certified implies Hurwitz on the stressed 3-bus case") {
    NetworkCase net = load_case3();
    net.scale = 1.5;
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;
    const Eigen::VectorXd sig = Eigen::VectorXd::Constant(3, -lambda + 0.02);
    const Certificate cert = certify(net, t, sig);
    REQUIRE(cert.certified);
    const SystemModel sys = SystemModel::build(net, t, SigmaPolicy(sig));
    CHECK(linearize(sys).spectral_abscissa < 0.0);
}

TEST_CASE("lyapunov function is anchored and decreasing on a certified lossless case") {
    const NetworkCase net = load_case3_lossless();
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;
    const SystemModel sys = SystemModel::build(net, t, SigmaPolicy(-lambda + 0.5));
    const LyapunovFunction lyap = LyapunovFunction::build(sys, net);

    CHECK(lyap.eval(sys.triplet().x_star) == doctest::Approx(0.0).epsilon(1e-13));

    std::mt19937_64 rng(31);
    const Eigen::VectorXd x0 =
        sys.triplet().x_star + random_direction(rng, sys.state_dim(), 0.05);
    const auto rhs = [&](double, const Eigen::VectorXd& x) { return sys.rhs(x); };
    const Trajectory traj = integrate(rhs, x0, 0.0, 10.0, 0.05);
    const MonotonicityReport rep = lyapunov_decreasing(lyap, traj.x, 1e-7);
    CHECK(rep.violations == 0);
    CHECK(rep.w_final < rep.w_initial);
}

TEST_CASE("lossy approximation error is measured, not asserted away") {
    const NetworkCase net = load_case3();  // r > 0
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;
    const SystemModel sys = SystemModel::build(net, t, SigmaPolicy(-lambda + 0.5));
    const LyapunovFunction lyap = LyapunovFunction::build(sys, net);

    std::mt19937_64 rng(33);
    const Eigen::VectorXd x0 =
        sys.triplet().x_star + random_direction(rng, sys.state_dim(), 0.05);
    const auto rhs = [&](double, const Eigen::VectorXd& x) { return sys.rhs(x); };
    const Trajectory traj = integrate(rhs, x0, 0.0, 10.0, 0.05);
    const MonotonicityReport rep = lyapunov_decreasing(lyap, traj.x, 1e-7);
    // the report quantifies any increase; third-order in the excursion size
    CHECK(rep.max_increase < 1e-3);
    CHECK(rep.w_final < rep.w_initial);
}

TEST_CASE("level sets of a single quadratic-droop bus are exact ellipses") {
    // one QD bus, no lines: the composite function is exactly quadratic with
    // axis weights 1/(2 D1) and 1/(2 D2)
    NetworkCase net;
    net.buses = {Bus{0, 0.0, 0.0, BusRole::Slack, 1.0}};
    DeviceSpec qd;
    qd.bus = 0;
    qd.kind = DeviceKind::QD;
    qd.droop = {0.7, 8.0};
    net.devices = {qd};

    const SystemModel sys = SystemModel::build(net, SigmaPolicy(0.9));
    const LyapunovFunction lyap = LyapunovFunction::build(sys, net);
    const RegionEstimate est = estimate_region(lyap, sys, 0, 1, 120, 7);
    CHECK_FALSE(est.grid_too_coarse);
    CHECK(est.level > 0.0);
    REQUIRE(est.boundary.size() > 20);

    const auto& qdm = std::get<QdModel>(sys.models()[0]);
    const double wt = 0.5 / qdm.gains.d1;  // theta axis weight
    const double wv = 0.5 / qdm.gains.d2;
    const double cell = 2.0 * est.delta / 119.0;
    for (const auto& pt : est.boundary) {
        const double w = wt * pt[0] * pt[0] + wv * pt[1] * pt[1];
        // boundary points interpolated on grid edges: allow one cell of slack
        const double r = std::sqrt(pt[0] * pt[0] + pt[1] * pt[1]);
        const double grad = 2.0 * std::max(wt, wv) * (r + cell);
        CHECK(std::abs(w - est.level) < grad * cell);
    }
}

TEST_CASE("degenerate grid reports GridTooCoarse") {
    NetworkCase net;
    net.buses = {Bus{0, 0.0, 0.0, BusRole::Slack, 1.0}};
    DeviceSpec qd;
    qd.bus = 0;
    qd.kind = DeviceKind::QD;
    qd.droop = {0.7, 8.0};
    net.devices = {qd};
    const SystemModel sys = SystemModel::build(net, SigmaPolicy(0.9));
    const LyapunovFunction lyap = LyapunovFunction::build(sys, net);
    const RegionEstimate est = estimate_region(lyap, sys, 0, 1, 1, 7);
    CHECK(est.grid_too_coarse);
}

TEST_CASE("certified verdict implies a definite storage hessian") {
    NetworkCase net = load_case3();
    net.scale = 1.25;
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;
    Eigen::VectorXd sig(3);
    sig << -lambda + 0.03, -lambda + 0.8, -lambda + 0.2;  // non-uniform
    const Certificate cert = certify(net, t, sig);
    REQUIRE(cert.certified);
    const NetworkStorage st = make_network_storage(t, net, sig);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(storage_hessian(st, t.y_star));
    CHECK(es.eigenvalues()(0) > 0.0);
}

TEST_CASE("trajectories from inside the estimated region head home") {
    const NetworkCase net = load_case3_lossless();
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;
    const SystemModel sys = SystemModel::build(net, t, SigmaPolicy(-lambda + 0.8));
    const LyapunovFunction lyap = LyapunovFunction::build(sys, net);
    const int ai = sys.state_index_theta(1), aj = sys.state_index_theta(2);
    const RegionEstimate est = estimate_region(lyap, sys, ai, aj, 80, 23);
    REQUIRE_FALSE(est.grid_too_coarse);
    REQUIRE(est.boundary.size() > 4);

    IntegratorOptions opts;
    opts.rtol = 1e-7;
    opts.atol = 1e-9;
    for (std::size_t pick : {0ul, est.boundary.size() / 2}) {
        Eigen::VectorXd x0 = sys.triplet().x_star;
        x0(ai) += 0.8 * est.boundary[pick][0];  // strictly inside the level set
        x0(aj) += 0.8 * est.boundary[pick][1];
        REQUIRE(lyap.eval(x0) < est.level);
        const auto rhs = [&](double, const Eigen::VectorXd& x) { return sys.rhs(x); };
        const Trajectory traj = integrate(rhs, x0, 0.0, 20.0, 1.0, opts);
        const double n0 = (x0 - sys.triplet().x_star).norm();
        const double nT = (traj.back_state() - sys.triplet().x_star).norm();
        CHECK(nT < 0.5 * n0);
        CHECK(lyap.eval(traj.back_state()) < 0.2 * lyap.eval(x0));
    }
}

TEST_CASE("greater indices enlarge the estimated region") {
    const NetworkCase net = load_case3();
    const EquilibriumTriplet t = solve_power_flow(net);
    const double lambda = network_lambda(t, net).lambda;
    double prev_area = 0.0;
    for (double ds : {0.5, 2.0, 6.0}) {
        const SystemModel sys = SystemModel::build(net, t, SigmaPolicy(-lambda + ds));
        const LyapunovFunction lyap = LyapunovFunction::build(sys, net);
        // project on the droop-bus angle plane (theta1, theta2)
        const RegionEstimate est = estimate_region(
            lyap, sys, sys.state_index_theta(1), sys.state_index_theta(2), 100, 11);
        CHECK(est.area >= prev_area);
        prev_area = est.area;
    }
}
