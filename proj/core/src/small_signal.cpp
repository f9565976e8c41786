#include "pgrid/small_signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pgrid/network_energy.hpp"

namespace pgrid {

LinearizedSystem linearize(const SystemModel& sys, double fd_step) {
    const Eigen::VectorXd x0 = sys.triplet().x_star;
    const int m = static_cast<int>(x0.size());
    LinearizedSystem lin;
    lin.jacobian = Eigen::MatrixXd(m, m);
    Eigen::VectorXd xp = x0, xm = x0;
    for (int j = 0; j < m; ++j) {
        const double step = fd_step * std::max(1.0, std::abs(x0(j)));
        xp(j) = x0(j) + step;
        xm(j) = x0(j) - step;
        lin.jacobian.col(j) = (sys.rhs(xp) - sys.rhs(xm)) / (2.0 * step);
        xp(j) = x0(j);
        xm(j) = x0(j);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(lin.jacobian, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw EigensolverFailure("nonsymmetric eigensolver failed on the system Jacobian");
    lin.eigenvalues = es.eigenvalues();
    lin.spectral_abscissa = lin.eigenvalues.real().maxCoeff();
    return lin;
}

double sigma_feasibility_floor(const NetworkCase& net, const EquilibriumTriplet& triplet,
                               double margin) {
    double floor = -std::numeric_limits<double>::infinity();
    for (const DeviceSpec& d : net.devices) {
        // devices with explicit gains or their own sigma never consult the
        // global sweep value
        if (d.droop_gains || d.sg_gains || d.sigma) continue;
        floor = std::max(floor, synthesis_floor(d, triplet.y_star.v(d.bus),
                                                triplet.q_star(d.bus), margin));
    }
    return floor;
}

MinSigmaResult min_sigma_exact(const NetworkCase& net, const MinSigmaOptions& opts) {
    const EquilibriumTriplet triplet = solve_power_flow(net);
    const double lambda = network_lambda(triplet, net).lambda;
    const double floor =
        sigma_feasibility_floor(net, triplet, opts.margin) + 1e-9;

    auto hurwitz = [&](double sigma) {
        const SystemModel sys = SystemModel::build(net, triplet, SigmaPolicy(sigma), opts.margin);
        return linearize(sys).spectral_abscissa < 0.0;
    };

    double lo = std::max(-lambda - opts.bracket_below, floor);
    double hi = -lambda + opts.bracket_above;

    int widenings = 0;
    while (!hurwitz(hi)) {
        if (++widenings > opts.max_widenings)
            throw BracketError("no Hurwitz sigma found up to " + std::to_string(hi));
        hi = lo + 2.0 * (hi - lo);
    }
    widenings = 0;
    while (hurwitz(lo)) {
        if (lo <= floor || widenings >= opts.max_widenings) {
            // stable all the way down to the feasibility floor: report the
            // floor as a one-sided upper bound
            return MinSigmaResult{lo, true};
        }
        ++widenings;
        lo = std::max(floor, lo - (hi - lo));
    }

    while (hi - lo > opts.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (hurwitz(mid))
            hi = mid;
        else
            lo = mid;
    }
    return MinSigmaResult{hi, false};
}

} // namespace pgrid
