#include "pgrid/bus_models.hpp"

#include <cmath>
#include <limits>

namespace pgrid {

namespace {

void require_positive_voltage(double v, const char* what) {
    if (!(v > 0.0)) throw DomainError(std::string(what) + " must stay positive, got " +
                                      std::to_string(v));
}

} // namespace

int state_dim(const BusModel& model) {
    return std::holds_alternative<SgModel>(model) ? 3 : 2;
}

DeviceKind kind_of(const BusModel& model) {
    if (std::holds_alternative<SgModel>(model)) return DeviceKind::SG;
    if (std::holds_alternative<CdModel>(model)) return DeviceKind::CD;
    return DeviceKind::QD;
}

double sigma_of(const BusModel& model) {
    return std::visit([](const auto& m) { return m.sigma; }, model);
}

Eigen::VectorXd equilibrium_state(const BusModel& model) {
    if (const auto* sg = std::get_if<SgModel>(&model)) {
        Eigen::VectorXd x(3);
        x << sg->delta_star, 0.0, sg->eq_star;
        return x;
    }
    Eigen::VectorXd x(2);
    if (const auto* cd = std::get_if<CdModel>(&model))
        x << cd->theta_star, cd->v_star;
    else {
        const auto& qd = std::get<QdModel>(model);
        x << qd.theta_star, qd.v_star;
    }
    return x;
}

Eigen::Vector2d output_of(const BusModel& model, const Eigen::VectorXd& state) {
    if (std::holds_alternative<SgModel>(model)) return {state(0), state(2)};
    return {state(0), state(1)};
}

Eigen::VectorXd rhs(const BusModel& model, const Eigen::VectorXd& state,
                    const Eigen::Vector2d& u) {
    const double p = -u(0);
    const double q_over_v = -u(1);
    if (const auto* sg = std::get_if<SgModel>(&model)) {
        const double delta = state(0), omega = state(1), eq = state(2);
        require_positive_voltage(eq, "SG internal voltage E_q'");
        const double pg = -sg->gains.ki * (delta - sg->delta_star) -
                          sg->gains.kp * omega + sg->pg_star;
        const double ef = -sg->gains.ke * (eq - sg->eq_star) + sg->ef_star;
        Eigen::VectorXd dx(3);
        dx(0) = omega;
        dx(1) = (-sg->par.d * omega - p + pg) / sg->par.m;
        dx(2) = (-eq - (sg->par.xd - sg->par.xd_prime) * q_over_v + ef) / sg->par.td_prime;
        return dx;
    }
    if (const auto* cd = std::get_if<CdModel>(&model)) {
        const double theta = state(0), v = state(1);
        require_positive_voltage(v, "CD bus voltage");
        const double q = q_over_v * v;
        Eigen::VectorXd dx(2);
        dx(0) = (-(theta - cd->theta_star) - cd->gains.d1 * (p - cd->p_star)) / cd->par.tau1;
        dx(1) = (-(v - cd->v_star) - cd->gains.d2 * (q - cd->q_star)) / cd->par.tau2;
        return dx;
    }
    const auto& qd = std::get<QdModel>(model);
    const double theta = state(0), v = state(1);
    require_positive_voltage(v, "QD bus voltage");
    const double q = q_over_v * v;
    Eigen::VectorXd dx(2);
    dx(0) = (-(theta - qd.theta_star) - qd.gains.d1 * (p - qd.p_star)) / qd.par.tau1;
    dx(1) = (-qd.gains.d2 * q - v * (v - qd.u_star)) / qd.par.tau2;
    return dx;
}

double storage(const BusModel& model, const Eigen::VectorXd& state) {
    if (const auto* sg = std::get_if<SgModel>(&model)) {
        const double dd = state(0) - sg->delta_star;
        const double omega = state(1);
        const double de = state(2) - sg->eq_star;
        const double xdiff = sg->par.xd - sg->par.xd_prime;
        return 0.5 * sg->par.m * omega * omega +
               0.5 * (sg->gains.ki - sg->sigma) * dd * dd +
               0.5 * ((sg->gains.ke + 1.0) / xdiff - sg->sigma) * de * de;
    }
    if (const auto* cd = std::get_if<CdModel>(&model)) {
        const double dt = state(0) - cd->theta_star;
        const double v = state(1);
        require_positive_voltage(v, "CD bus voltage");
        const double k = cd->v_star + cd->gains.d2 * cd->q_star;
        const double dv = v - cd->v_star;
        const double raw = 0.5 * (1.0 / cd->gains.d1 - cd->sigma) * dt * dt +
                           k / cd->gains.d2 * (v / cd->v_star - std::log(v)) -
                           0.5 * cd->sigma * dv * dv;
        const double offset = k / cd->gains.d2 * (1.0 - std::log(cd->v_star));
        return raw - offset;
    }
    const auto& qd = std::get<QdModel>(model);
    const double dt = state(0) - qd.theta_star;
    const double dv = state(1) - qd.v_star;
    return 0.5 * (1.0 / qd.gains.d1 - qd.sigma) * dt * dt +
           0.5 * (1.0 / qd.gains.d2 - qd.sigma) * dv * dv;
}

Eigen::VectorXd storage_gradient(const BusModel& model, const Eigen::VectorXd& state) {
    if (const auto* sg = std::get_if<SgModel>(&model)) {
        const double xdiff = sg->par.xd - sg->par.xd_prime;
        Eigen::VectorXd g(3);
        g(0) = (sg->gains.ki - sg->sigma) * (state(0) - sg->delta_star);
        g(1) = sg->par.m * state(1);
        g(2) = ((sg->gains.ke + 1.0) / xdiff - sg->sigma) * (state(2) - sg->eq_star);
        return g;
    }
    if (const auto* cd = std::get_if<CdModel>(&model)) {
        const double v = state(1);
        require_positive_voltage(v, "CD bus voltage");
        const double k = cd->v_star + cd->gains.d2 * cd->q_star;
        Eigen::VectorXd g(2);
        g(0) = (1.0 / cd->gains.d1 - cd->sigma) * (state(0) - cd->theta_star);
        g(1) = k / cd->gains.d2 * (1.0 / cd->v_star - 1.0 / v) -
               cd->sigma * (v - cd->v_star);
        return g;
    }
    const auto& qd = std::get<QdModel>(model);
    Eigen::VectorXd g(2);
    g(0) = (1.0 / qd.gains.d1 - qd.sigma) * (state(0) - qd.theta_star);
    g(1) = (1.0 / qd.gains.d2 - qd.sigma) * (state(1) - qd.v_star);
    return g;
}

SupplyResidual supply_residual(const BusModel& model, const Eigen::VectorXd& state,
                               const Eigen::Vector2d& u) {
    const Eigen::VectorXd dx = rhs(model, state, u);
    const Eigen::VectorXd grad = storage_gradient(model, state);
    const Eigen::Vector2d y = output_of(model, state);
    const double p = -u(0);
    const double q_over_v = -u(1);

    Eigen::Vector2d y_dot;
    double p_star, q_star, v_star, theta_star, phi_val;
    if (const auto* sg = std::get_if<SgModel>(&model)) {
        y_dot << dx(0), dx(2);
        p_star = sg->p_star;
        q_star = sg->q_star;
        v_star = sg->eq_star;
        theta_star = sg->delta_star;
        phi_val = (sg->par.d + sg->gains.kp) * dx(0) * dx(0) +
                  sg->par.td_prime / (sg->par.xd - sg->par.xd_prime) * dx(2) * dx(2);
    } else if (const auto* cd = std::get_if<CdModel>(&model)) {
        y_dot << dx(0), dx(1);
        p_star = cd->p_star;
        q_star = cd->q_star;
        v_star = cd->v_star;
        theta_star = cd->theta_star;
        phi_val = cd->par.tau1 / cd->gains.d1 * dx(0) * dx(0) +
                  cd->par.tau2 / (cd->gains.d2 * state(1)) * dx(1) * dx(1);
    } else {
        const auto& qd = std::get<QdModel>(model);
        y_dot << dx(0), dx(1);
        p_star = qd.p_star;
        q_star = qd.q_star;
        v_star = qd.v_star;
        theta_star = qd.theta_star;
        phi_val = qd.par.tau1 / qd.gains.d1 * dx(0) * dx(0) +
                  qd.par.tau2 / (qd.gains.d2 * state(1)) * dx(1) * dx(1);
    }

    SupplyResidual out;
    out.s_dot = grad.dot(dx);
    const double sig = sigma_of(model);
    out.supply = -(p - p_star) * y_dot(0) - (q_over_v - q_star / v_star) * y_dot(1) -
                 sig * ((y(0) - theta_star) * y_dot(0) + (y(1) - v_star) * y_dot(1));
    out.phi = phi_val;
    out.residual = out.s_dot - out.supply + out.phi;
    return out;
}

SgGains synthesize_sg_gains(const SgParams& par, double sigma, double margin) {
    if (!(margin > 0.0)) throw InfeasibleGain("gain margin must be positive");
    SgGains g;
    g.ki = sigma + margin;
    g.kp = -par.d + margin;
    g.ke = (par.xd - par.xd_prime) * sigma - 1.0 + margin;
    return g;
}

DroopGains synthesize_cd_gains(double sigma, double v_star, double q_star, double margin) {
    if (!(margin > 0.0)) throw InfeasibleGain("gain margin must be positive");
    const double d1_inv = sigma + margin;
    const double d2_den = v_star * v_star * sigma - q_star + margin * v_star;
    if (d1_inv <= 0.0)
        throw InfeasibleGain("CD angle droop bound 1/D1 > sigma forces non-positive gain (sigma = " +
                             std::to_string(sigma) + ")");
    if (d2_den <= 0.0)
        throw InfeasibleGain("CD voltage droop bound 1/D2 > (V*^2 sigma - Q*)/V* forces non-positive gain (sigma = " +
                             std::to_string(sigma) + ", Q* = " + std::to_string(q_star) + ")");
    return DroopGains{1.0 / d1_inv, v_star / d2_den};
}

DroopGains synthesize_qd_gains(double sigma, double margin) {
    if (!(margin > 0.0)) throw InfeasibleGain("gain margin must be positive");
    const double d_inv = sigma + margin;
    if (d_inv <= 0.0)
        throw InfeasibleGain("QD droop bound 1/D > sigma forces non-positive gain (sigma = " +
                             std::to_string(sigma) + ")");
    return DroopGains{1.0 / d_inv, 1.0 / d_inv};
}

bool gains_satisfy(const BusModel& model, double sigma) {
    if (const auto* sg = std::get_if<SgModel>(&model)) {
        return sg->gains.ki > sigma && sg->gains.kp > -sg->par.d &&
               sg->gains.ke > (sg->par.xd - sg->par.xd_prime) * sigma - 1.0;
    }
    if (const auto* cd = std::get_if<CdModel>(&model)) {
        if (!(cd->gains.d1 > 0.0 && cd->gains.d2 > 0.0)) return false;
        return 1.0 / cd->gains.d1 > sigma &&
               1.0 / cd->gains.d2 >
                   (cd->v_star * cd->v_star * sigma - cd->q_star) / cd->v_star;
    }
    const auto& qd = std::get<QdModel>(model);
    if (!(qd.gains.d1 > 0.0 && qd.gains.d2 > 0.0)) return false;
    return 1.0 / qd.gains.d1 > sigma && 1.0 / qd.gains.d2 > sigma;
}

double synthesis_floor(const DeviceSpec& spec, double v_star, double q_star, double margin) {
    switch (spec.kind) {
        case DeviceKind::SG:
            return -std::numeric_limits<double>::infinity();
        case DeviceKind::QD:
            return -margin;
        case DeviceKind::CD:
            // both denominators must be positive
            return std::max(-margin, (q_star - margin * v_star) / (v_star * v_star));
    }
    return 0.0;
}

ObservabilityWitness check_steady_state_observability(const BusModel& model) {
    if (!std::holds_alternative<SgModel>(model))
        return {true, "state equals output"};

    const auto& sg = std::get<SgModel>(model);
    if (!(sg.gains.kp > -sg.par.d))
        return {false, "frozen-output frequency subsystem not contracting (K_P <= -D)"};

    // Clamp (delta, E_q') at arbitrary values with the steady-output-consistent
    // input P = Pg* - K_I (delta - delta*); the remaining frequency dynamics is
    // M omega_dot = -(D + K_P) omega. Simulate and check omega, omega_dot -> 0.
    const double delta = sg.delta_star + 0.37;
    const double p_in = sg.pg_star - sg.gains.ki * (delta - sg.delta_star);
    double omega = 0.1;
    const double rate = (sg.par.d + sg.gains.kp) / sg.par.m;
    const double t_end = 40.0 / rate;
    const double h = 0.01 / rate;
    auto omega_dot = [&](double w) {
        const double pg = -sg.gains.ki * (delta - sg.delta_star) - sg.gains.kp * w + sg.pg_star;
        return (-sg.par.d * w - p_in + pg) / sg.par.m;
    };
    for (double t = 0.0; t < t_end; t += h) {
        const double k1 = omega_dot(omega);
        const double k2 = omega_dot(omega + 0.5 * h * k1);
        const double k3 = omega_dot(omega + 0.5 * h * k2);
        const double k4 = omega_dot(omega + h * k3);
        omega += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const bool ok = std::abs(omega) < 1e-9 && std::abs(omega_dot(omega)) < 1e-9;
    return {ok, ok ? "clamped-output frequency state decays to rest"
                   : "clamped-output frequency state failed to settle"};
}

BusModel make_model(const DeviceSpec& spec, double theta_star, double v_star,
                    double p_star, double q_star, double sigma_global, double margin) {
    const double sigma = spec.sigma.value_or(sigma_global);
    switch (spec.kind) {
        case DeviceKind::SG: {
            SgModel m;
            m.par = spec.sg;
            m.gains = spec.sg_gains ? *spec.sg_gains
                                    : synthesize_sg_gains(spec.sg, sigma, margin);
            m.sigma = sigma;
            m.delta_star = theta_star;
            m.eq_star = v_star;
            m.p_star = p_star;
            m.q_star = q_star;
            m.pg_star = p_star;
            m.ef_star = v_star + (spec.sg.xd - spec.sg.xd_prime) * q_star / v_star;
            return m;
        }
        case DeviceKind::CD: {
            CdModel m;
            m.par = spec.droop;
            m.gains = spec.droop_gains ? *spec.droop_gains
                                       : synthesize_cd_gains(sigma, v_star, q_star, margin);
            m.sigma = sigma;
            m.theta_star = theta_star;
            m.v_star = v_star;
            m.p_star = p_star;
            m.q_star = q_star;
            return m;
        }
        case DeviceKind::QD: {
            QdModel m;
            m.par = spec.droop;
            m.gains = spec.droop_gains ? *spec.droop_gains
                                       : synthesize_qd_gains(sigma, margin);
            m.sigma = sigma;
            m.theta_star = theta_star;
            m.v_star = v_star;
            m.p_star = p_star;
            m.q_star = q_star;
            m.u_star = v_star + m.gains.d2 * q_star / v_star;
            return m;
        }
    }
    throw ValidationError("unknown device kind");
}

} // namespace pgrid
