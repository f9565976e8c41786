#include "pgrid/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace pgrid {

Certificate certify(const NetworkCase& net, const EquilibriumTriplet& triplet,
                    const Eigen::VectorXd& sigmas) {
    if (sigmas.size() != net.size())
        throw ValidationError("certify: sigma vector length must equal the bus count");
    Certificate cert;
    cert.lambda = network_lambda(triplet, net).lambda;
    cert.sigmas = sigmas;
    cert.per_bus_margin = sigmas.array() + cert.lambda;
    for (int i = 0; i < sigmas.size(); ++i)
        if (!(cert.per_bus_margin(i) > 0.0)) cert.violators.push_back(i);
    cert.certified = cert.violators.empty();
    return cert;
}

LyapunovFunction LyapunovFunction::build(const SystemModel& sys, const NetworkCase& net) {
    LyapunovFunction lyap;
    lyap.network_ = make_network_storage(sys.triplet(), net, sys.sigmas());
    lyap.models_ = sys.models();
    lyap.offsets_.resize(sys.bus_count());
    for (int i = 0; i < sys.bus_count(); ++i) lyap.offsets_[i] = sys.state_offset(i);
    lyap.x_star_ = sys.triplet().x_star;
    return lyap;
}

double LyapunovFunction::eval(const Eigen::VectorXd& state) const {
    OperatingPoint op;
    const int n = static_cast<int>(models_.size());
    op.theta = Eigen::VectorXd(n);
    op.v = Eigen::VectorXd(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto xi = state.segment(offsets_[i], state_dim(models_[i]));
        const Eigen::Vector2d y = output_of(models_[i], xi);
        if (!(y(1) > 0.0))
            throw DomainError("Lyapunov evaluation outside the V > 0 domain");
        op.theta(i) = y(0);
        op.v(i) = y(1);
        total += storage(models_[i], xi);
    }
    total += storage_eval(network_, op);
    return total;
}

double LyapunovFunction::derivative(const SystemModel& sys,
                                    const Eigen::VectorXd& state) const {
    const Eigen::VectorXd dx = sys.rhs(state);
    const OperatingPoint op = sys.outputs(state);
    const int n = static_cast<int>(models_.size());

    // network part: (grad WB(y) - grad WB(y*) + Sigma (y - y*) [+ lossy]) . y_dot
    Eigen::VectorXd y_dot(2 * n);
    for (int i = 0; i < n; ++i) {
        const auto dxi = dx.segment(offsets_[i], state_dim(models_[i]));
        const bool sg = state_dim(models_[i]) == 3;
        y_dot(i) = dxi(0);
        y_dot(n + i) = sg ? dxi(2) : dxi(1);
    }
    const Eigen::VectorXd dy = op.stacked() - network_.y_star.stacked();
    Eigen::VectorXd grad_net = wb_gradient(op, network_.b) - network_.grad_star;
    for (int i = 0; i < n; ++i) {
        grad_net(i) += network_.sigma(i) * dy(i);
        grad_net(n + i) += network_.sigma(i) * dy(n + i);
    }
    if (network_.lossy_correction)
        grad_net += 0.5 * (*network_.lossy_correction + network_.lossy_correction->transpose()) * dy;
    double total = grad_net.dot(y_dot);

    for (int i = 0; i < n; ++i) {
        const auto xi = state.segment(offsets_[i], state_dim(models_[i]));
        const auto dxi = dx.segment(offsets_[i], state_dim(models_[i]));
        total += storage_gradient(models_[i], xi).dot(dxi);
    }
    return total;
}

double LyapunovFunction::dissipation(const SystemModel& sys,
                                     const Eigen::VectorXd& state) const {
    const Eigen::VectorXd u = sys.inputs(state, sys.admittance());
    double total = 0.0;
    for (int i = 0; i < static_cast<int>(models_.size()); ++i) {
        const auto xi = state.segment(offsets_[i], state_dim(models_[i]));
        total += supply_residual(models_[i], xi, u.segment<2>(2 * i)).phi;
    }
    return total;
}

double LyapunovFunction::domain_radius(std::uint64_t seed, double delta_step,
                                       double max_radius,
                                       int samples_per_shell) const {
    const int dim = static_cast<int>(x_star_.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double good = 0.0;
    for (double r = delta_step; r <= max_radius + 1e-12; r += delta_step) {
        for (int k = 0; k < samples_per_shell; ++k) {
            Eigen::VectorXd d(dim);
            for (int i = 0; i < dim; ++i) d(i) = gauss(rng);
            d *= r / d.norm();
            const Eigen::VectorXd x = x_star_ + d;
            try {
                if (eval(x) <= 0.0) return good;
            } catch (const DomainError&) {
                return good;  // shell pierced the V > 0 boundary
            }
        }
        good = r;
    }
    return good;
}

MonotonicityReport lyapunov_decreasing(const LyapunovFunction& lyap,
                                       const std::vector<Eigen::VectorXd>& states,
                                       double tolerance) {
    MonotonicityReport rep;
    if (states.empty()) return rep;
    double prev = lyap.eval(states.front());
    rep.w_initial = prev;
    for (std::size_t i = 1; i < states.size(); ++i) {
        const double w = lyap.eval(states[i]);
        const double inc = w - prev;
        if (inc > tolerance) {
            ++rep.violations;
            rep.max_increase = std::max(rep.max_increase, inc);
        } else if (inc > 0.0) {
            rep.max_increase = std::max(rep.max_increase, inc);
        }
        prev = w;
    }
    rep.w_final = prev;
    return rep;
}

RegionEstimate estimate_region(const LyapunovFunction& lyap, const SystemModel& sys,
                               int axis_i, int axis_j, int grid_n, std::uint64_t seed) {
    RegionEstimate est;
    const Eigen::VectorXd& xs = lyap.x_star();
    if (axis_i < 0 || axis_j < 0 || axis_i >= xs.size() || axis_j >= xs.size() ||
        axis_i == axis_j)
        throw ValidationError("estimate_region: invalid projection axes");
    if (grid_n < 2) {
        est.grid_too_coarse = true;
        return est;
    }

    if (sys.state_dim() != static_cast<int>(xs.size()))
        throw ValidationError("estimate_region: system/Lyapunov state dimensions differ");

    const double delta = lyap.domain_radius(seed);
    est.delta = delta;
    if (delta <= 0.0) {
        est.grid_too_coarse = true;
        return est;
    }

    // level value: minimum of W over the boundary shell of the verified domain
    {
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double cmin = std::numeric_limits<double>::infinity();
        const int dim = static_cast<int>(xs.size());
        for (int k = 0; k < 512; ++k) {
            Eigen::VectorXd d(dim);
            for (int i = 0; i < dim; ++i) d(i) = gauss(rng);
            d *= delta / d.norm();
            try {
                cmin = std::min(cmin, lyap.eval(xs + d));
            } catch (const DomainError&) {
            }
        }
        est.level = cmin;
    }

    // sample W on the projection plane, other states at equilibrium
    Eigen::MatrixXd w(grid_n, grid_n);
    const double lo = -delta, hi = delta;
    const double cell = (hi - lo) / (grid_n - 1);
    Eigen::VectorXd x = xs;
    for (int a = 0; a < grid_n; ++a) {
        for (int b = 0; b < grid_n; ++b) {
            x(axis_i) = xs(axis_i) + lo + a * cell;
            x(axis_j) = xs(axis_j) + lo + b * cell;
            try {
                w(a, b) = lyap.eval(x);
            } catch (const DomainError&) {
                w(a, b) = std::numeric_limits<double>::infinity();
            }
        }
    }
    x(axis_i) = xs(axis_i);
    x(axis_j) = xs(axis_j);

    // boundary of {W <= c}: sign-change crossings along grid edges
    const double c = est.level;
    auto alpha_of = [&](int idx) { return lo + idx * cell; };
    for (int a = 0; a < grid_n; ++a) {
        for (int b = 0; b < grid_n; ++b) {
            const double f0 = w(a, b) - c;
            if (a + 1 < grid_n) {
                const double f1 = w(a + 1, b) - c;
                if (std::isfinite(f0) && std::isfinite(f1) && f0 * f1 < 0.0) {
                    const double t = f0 / (f0 - f1);
                    est.boundary.push_back({alpha_of(a) + t * cell, alpha_of(b)});
                }
            }
            if (b + 1 < grid_n) {
                const double f1 = w(a, b + 1) - c;
                if (std::isfinite(f0) && std::isfinite(f1) && f0 * f1 < 0.0) {
                    const double t = f0 / (f0 - f1);
                    est.boundary.push_back({alpha_of(a), alpha_of(b) + t * cell});
                }
            }
            if (w(a, b) <= c) est.area += cell * cell;
        }
    }
    if (est.boundary.empty()) est.grid_too_coarse = true;
    return est;
}

} // namespace pgrid
