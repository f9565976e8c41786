#include "pgrid/network_energy.hpp"

#include <cmath>

namespace pgrid {

double wb_tilde(const OperatingPoint& op, const Eigen::MatrixXd& b) {
    const int n = op.size();
    double val = 0.0;
    for (int i = 0; i < n; ++i) val += -0.5 * b(i, i) * op.v(i) * op.v(i);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (b(i, j) == 0.0) continue;
            val -= b(i, j) * op.v(i) * op.v(j) * std::cos(op.theta(i) - op.theta(j));
        }
    return val;
}

Eigen::VectorXd wb_gradient(const OperatingPoint& op, const Eigen::MatrixXd& b) {
    const int n = op.size();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < n; ++i) {
        double gt = 0.0;
        double gv = -b(i, i) * op.v(i);
        for (int j = 0; j < n; ++j) {
            if (j == i || b(i, j) == 0.0) continue;
            const double tij = op.theta(i) - op.theta(j);
            gt += b(i, j) * op.v(i) * op.v(j) * std::sin(tij);
            gv -= b(i, j) * op.v(j) * std::cos(tij);
        }
        grad(i) = gt;
        grad(n + i) = gv;
    }
    return grad;
}

Eigen::MatrixXd wb_hessian(const OperatingPoint& op, const Eigen::MatrixXd& b) {
    const int n = op.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        h(n + k, n + k) = -b(k, k);
        for (int j = 0; j < n; ++j) {
            if (j == k || b(k, j) == 0.0) continue;
            const double tkj = op.theta(k) - op.theta(j);
            const double c = std::cos(tkj), s = std::sin(tkj);
            h(k, k) += b(k, j) * op.v(k) * op.v(j) * c;
            h(k, j) = -b(k, j) * op.v(k) * op.v(j) * c;
            h(k, n + k) += b(k, j) * op.v(j) * s;
            h(k, n + j) = b(k, j) * op.v(k) * s;
            h(n + k, n + j) = -b(k, j) * c;
        }
    }
    // mirror the theta-V block; the V-V and theta-theta blocks are already symmetric
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) h(n + c, r) = h(r, n + c);
    return h;
}

Eigen::VectorXd phi(const OperatingPoint& op, const Eigen::MatrixXd& g) {
    const int n = op.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < n; ++i) {
        double fp = g(i, i) * op.v(i) * op.v(i);
        double fq = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i || g(i, j) == 0.0) continue;
            const double tij = op.theta(i) - op.theta(j);
            fp += g(i, j) * op.v(i) * op.v(j) * std::cos(tij);
            fq += g(i, j) * op.v(j) * std::sin(tij);
        }
        out(i) = fp;
        out(n + i) = fq;
    }
    return out;
}

Eigen::MatrixXd phi_jacobian(const OperatingPoint& op, const Eigen::MatrixXd& g) {
    const int n = op.size();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        jac(k, n + k) = 2.0 * g(k, k) * op.v(k);
        for (int j = 0; j < n; ++j) {
            if (j == k || g(k, j) == 0.0) continue;
            const double tkj = op.theta(k) - op.theta(j);
            const double c = std::cos(tkj), s = std::sin(tkj);
            // row k: phi_p_k
            jac(k, k) += -g(k, j) * op.v(k) * op.v(j) * s;
            jac(k, j) = g(k, j) * op.v(k) * op.v(j) * s;
            jac(k, n + k) += g(k, j) * op.v(j) * c;
            jac(k, n + j) = g(k, j) * op.v(k) * c;
            // row n+k: phi_q_k
            jac(n + k, k) += g(k, j) * op.v(j) * c;
            jac(n + k, j) = -g(k, j) * op.v(j) * c;
            jac(n + k, n + j) = g(k, j) * s;
        }
    }
    return jac;
}

NetworkIndex network_lambda(const EquilibriumTriplet& triplet, const NetworkCase& net) {
    const Admittance adm = build_admittance(net);
    NetworkIndex idx;
    idx.lossless = is_lossless(net);
    Eigen::MatrixXd h = wb_hessian(triplet.y_star, adm.b);
    if (!idx.lossless) {
        const Eigen::MatrixXd jp = phi_jacobian(triplet.y_star, adm.g);
        h += 0.5 * (jp + jp.transpose());
    }
    h = 0.5 * (h + h.transpose());  // guard against round-off asymmetry
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success)
        throw EigensolverFailure("symmetric eigensolver failed on the network Hessian");
    idx.hessian = std::move(h);
    idx.lambda = es.eigenvalues()(0);
    idx.min_eigenvector = es.eigenvectors().col(0);
    return idx;
}

NetworkStorage make_network_storage(const EquilibriumTriplet& triplet,
                                    const NetworkCase& net,
                                    const Eigen::VectorXd& sigma) {
    if (sigma.size() != net.size())
        throw ValidationError("sigma vector length must equal the bus count");
    const Admittance adm = build_admittance(net);
    NetworkStorage st;
    st.y_star = triplet.y_star;
    st.sigma = sigma;
    st.lossless = is_lossless(net);
    st.b = adm.b;
    st.wb_star = wb_tilde(triplet.y_star, adm.b);
    st.grad_star = wb_gradient(triplet.y_star, adm.b);
    if (!st.lossless) st.lossy_correction = phi_jacobian(triplet.y_star, adm.g);
    return st;
}

double storage_eval(const NetworkStorage& st, const OperatingPoint& op) {
    const int n = op.size();
    const Eigen::VectorXd dy = op.stacked() - st.y_star.stacked();
    double val = wb_tilde(op, st.b) - dy.dot(st.grad_star) - st.wb_star;
    for (int i = 0; i < n; ++i)
        val += 0.5 * st.sigma(i) * (dy(i) * dy(i) + dy(n + i) * dy(n + i));
    if (st.lossy_correction) val += 0.5 * dy.dot(*st.lossy_correction * dy);
    return val;
}

Eigen::MatrixXd storage_hessian(const NetworkStorage& st, const OperatingPoint& op) {
    const int n = op.size();
    Eigen::MatrixXd h = wb_hessian(op, st.b);
    for (int i = 0; i < n; ++i) {
        h(i, i) += st.sigma(i);
        h(n + i, n + i) += st.sigma(i);
    }
    if (st.lossy_correction)
        h += 0.5 * (*st.lossy_correction + st.lossy_correction->transpose());
    return h;
}

} // namespace pgrid
