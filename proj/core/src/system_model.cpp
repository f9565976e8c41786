#include "pgrid/system_model.hpp"

#include <algorithm>

namespace pgrid {

SystemModel SystemModel::build(const NetworkCase& net, const SigmaPolicy& sigma,
                               double margin, const PowerFlowOptions& pf_opts) {
    return build(net, solve_power_flow(net, pf_opts), sigma, margin);
}

SystemModel SystemModel::build(const NetworkCase& net, const EquilibriumTriplet& triplet,
                               const SigmaPolicy& sigma, double margin) {
    const int n = net.size();
    if (static_cast<int>(net.devices.size()) != n)
        throw ValidationError("dynamic assembly requires exactly one device per bus (" +
                              std::to_string(net.devices.size()) + " devices, " +
                              std::to_string(n) + " buses)");

    std::vector<const DeviceSpec*> by_bus(n, nullptr);
    for (const DeviceSpec& d : net.devices) by_bus[d.bus] = &d;
    for (int i = 0; i < n; ++i)
        if (!by_bus[i]) throw ValidationError("no device at bus " + std::to_string(i));

    SystemModel sys;
    sys.triplet_ = triplet;
    sys.adm_ = build_admittance(net);
    sys.lossless_ = is_lossless(net);
    sys.sigmas_ = Eigen::VectorXd(n);
    sys.models_.reserve(n);
    sys.offsets_.resize(n);
    int off = 0;
    for (int i = 0; i < n; ++i) {
        BusModel m = [&] {
            try {
                return make_model(*by_bus[i], triplet.y_star.theta(i), triplet.y_star.v(i),
                                  triplet.p_star(i), triplet.q_star(i), sigma.at(i), margin);
            } catch (const InfeasibleGain& e) {
                throw InfeasibleGain("bus " + std::to_string(i) + ": " + e.what());
            }
        }();
        sys.sigmas_(i) = sigma_of(m);
        sys.offsets_[i] = off;
        off += pgrid::state_dim(m);
        sys.models_.push_back(std::move(m));
    }
    sys.dim_ = off;
    sys.triplet_.x_star = sys.equilibrium_state();
    return sys;
}

Eigen::VectorXd SystemModel::equilibrium_state() const {
    Eigen::VectorXd x(dim_);
    for (int i = 0; i < bus_count(); ++i)
        x.segment(offsets_[i], state_dim_of(i)) = pgrid::equilibrium_state(models_[i]);
    return x;
}

OperatingPoint SystemModel::outputs(const Eigen::VectorXd& state) const {
    const int n = bus_count();
    OperatingPoint op;
    op.theta = Eigen::VectorXd(n);
    op.v = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d y =
            output_of(models_[i], state.segment(offsets_[i], state_dim_of(i)));
        op.theta(i) = y(0);
        op.v(i) = y(1);
    }
    return op;
}

Eigen::VectorXd SystemModel::inputs(const Eigen::VectorXd& state, const Admittance& adm) const {
    const int n = bus_count();
    const OperatingPoint op = outputs(state);
    for (int i = 0; i < n; ++i)
        if (!(op.v(i) > 0.0))
            throw DomainError("bus " + std::to_string(i) + " voltage collapsed to " +
                              std::to_string(op.v(i)));
    const PowerInjection inj = injections(op, adm);
    Eigen::VectorXd u(2 * n);
    for (int i = 0; i < n; ++i) {
        u(2 * i) = -inj.p(i);
        u(2 * i + 1) = -inj.q(i) / op.v(i);
    }
    return u;
}

Eigen::VectorXd SystemModel::rhs(const Eigen::VectorXd& state, const Admittance& adm) const {
    const Eigen::VectorXd u = inputs(state, adm);
    Eigen::VectorXd dx(dim_);
    for (int i = 0; i < bus_count(); ++i) {
        dx.segment(offsets_[i], state_dim_of(i)) =
            pgrid::rhs(models_[i], state.segment(offsets_[i], state_dim_of(i)),
                       u.segment<2>(2 * i));
    }
    return dx;
}

} // namespace pgrid
