#include "pgrid/power_flow.hpp"

#include <cmath>
#include <vector>

namespace pgrid {

PowerInjection injections(const OperatingPoint& op, const Admittance& adm) {
    const int n = op.size();
    PowerInjection out;
    out.p = Eigen::VectorXd::Zero(n);
    out.q = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        double pi = adm.g(i, i) * op.v(i) * op.v(i);
        double qi = -adm.b(i, i) * op.v(i) * op.v(i);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double bij = adm.b(i, j), gij = adm.g(i, j);
            if (bij == 0.0 && gij == 0.0) continue;
            const double tij = op.theta(i) - op.theta(j);
            const double vv = op.v(i) * op.v(j);
            pi += vv * (bij * std::sin(tij) + gij * std::cos(tij));
            qi -= vv * (bij * std::cos(tij) - gij * std::sin(tij));
        }
        out.p(i) = pi;
        out.q(i) = qi;
    }
    return out;
}

Eigen::MatrixXd injection_jacobian(const OperatingPoint& op, const Admittance& adm) {
    const int n = op.size();
    const PowerInjection inj = injections(op, adm);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        const double vi = op.v(i);
        jac(i, i) = -inj.q(i) - adm.b(i, i) * vi * vi;
        jac(i, n + i) = inj.p(i) / vi + adm.g(i, i) * vi;
        jac(n + i, i) = inj.p(i) - adm.g(i, i) * vi * vi;
        jac(n + i, n + i) = inj.q(i) / vi - adm.b(i, i) * vi;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double bij = adm.b(i, j), gij = adm.g(i, j);
            if (bij == 0.0 && gij == 0.0) continue;
            const double tij = op.theta(i) - op.theta(j);
            const double c = std::cos(tij), s = std::sin(tij);
            jac(i, j) = -vi * op.v(j) * (bij * c - gij * s);
            jac(i, n + j) = vi * (bij * s + gij * c);
            jac(n + i, j) = -vi * op.v(j) * (bij * s + gij * c);
            jac(n + i, n + j) = -vi * (bij * c - gij * s);
        }
    }
    return jac;
}

EquilibriumTriplet solve_power_flow(const NetworkCase& net, const PowerFlowOptions& opts) {
    validate(net);
    const int n = net.size();
    const Admittance adm = build_admittance(net);

    Eigen::VectorXd p_set = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd q_set = Eigen::VectorXd::Zero(n);
    for (const LoadSpec& l : net.loads) {
        p_set(l.bus) += l.p * net.scale;
        q_set(l.bus) += l.q * net.scale;
    }

    std::vector<int> ang_idx, v_idx;
    for (const Bus& b : net.buses) {
        if (b.role != BusRole::Slack) ang_idx.push_back(b.id);
        if (b.role == BusRole::PQ) v_idx.push_back(b.id);
    }
    const int na = static_cast<int>(ang_idx.size());
    const int nv = static_cast<int>(v_idx.size());

    OperatingPoint op;
    op.theta = Eigen::VectorXd::Zero(n);
    op.v = Eigen::VectorXd::Ones(n);
    for (const Bus& b : net.buses)
        if (b.role != BusRole::PQ) op.v(b.id) = b.v_set;

    auto mismatch = [&](const PowerInjection& inj) {
        Eigen::VectorXd mis(na + nv);
        for (int k = 0; k < na; ++k) mis(k) = inj.p(ang_idx[k]) - p_set(ang_idx[k]);
        for (int k = 0; k < nv; ++k) mis(na + k) = inj.q(v_idx[k]) - q_set(v_idx[k]);
        return mis;
    };

    int iter = 0;
    double residual = 0.0;
    for (;; ++iter) {
        const PowerInjection inj = injections(op, adm);
        const Eigen::VectorXd mis = mismatch(inj);
        residual = (na + nv) > 0 ? mis.lpNorm<Eigen::Infinity>() : 0.0;
        if (residual < opts.tolerance) {
            EquilibriumTriplet t;
            t.y_star = op;
            t.p_star = inj.p;
            t.q_star = inj.q;
            t.u_star = Eigen::VectorXd(2 * n);
            t.u_star << -inj.p, (-inj.q.array() / op.v.array()).matrix();
            t.iterations = iter;
            t.residual = residual;
            return t;
        }
        if (iter >= opts.max_iterations) throw NonConvergence(iter, residual);

        const Eigen::MatrixXd full = injection_jacobian(op, adm);
        Eigen::MatrixXd jac(na + nv, na + nv);
        for (int r = 0; r < na; ++r) {
            for (int c = 0; c < na; ++c) jac(r, c) = full(ang_idx[r], ang_idx[c]);
            for (int c = 0; c < nv; ++c) jac(r, na + c) = full(ang_idx[r], n + v_idx[c]);
        }
        for (int r = 0; r < nv; ++r) {
            for (int c = 0; c < na; ++c) jac(na + r, c) = full(n + v_idx[r], ang_idx[c]);
            for (int c = 0; c < nv; ++c) jac(na + r, na + c) = full(n + v_idx[r], n + v_idx[c]);
        }

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        const double rc = lu.rcond();
        if (!std::isfinite(rc) || rc < 1e-14) throw SingularJacobian(iter, rc);
        const Eigen::VectorXd step = lu.solve(-mis);
        if (!step.allFinite()) throw SingularJacobian(iter, rc);

        for (int k = 0; k < na; ++k) op.theta(ang_idx[k]) += step(k);
        for (int k = 0; k < nv; ++k) op.v(v_idx[k]) += step(na + k);
        if ((op.v.array() <= 0.0).any())
            throw NonConvergence(iter + 1, residual);  // voltage iterate collapsed
    }
}

} // namespace pgrid
