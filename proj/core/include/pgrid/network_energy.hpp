#pragma once

#include <Eigen/Dense>
#include <optional>

#include "pgrid/power_flow.hpp"

namespace pgrid {

// Energy-function machinery of the network coupling. All vectors and
// matrices use the fixed ordering (theta_1..theta_n, v_1..v_n).

/// Susceptance energy function: sum_i -B_ii V_i^2 / 2
/// - sum_{(i,j)} B_ij V_i V_j cos(theta_i - theta_j).
double wb_tilde(const OperatingPoint& op, const Eigen::MatrixXd& b);

/// Analytic gradient of wb_tilde; on lossless networks this equals
/// (P_1..P_n, Q_1/V_1..Q_n/V_n).
Eigen::VectorXd wb_gradient(const OperatingPoint& op, const Eigen::MatrixXd& b);

/// Analytic Hessian of wb_tilde, symmetric by construction.
Eigen::MatrixXd wb_hessian(const OperatingPoint& op, const Eigen::MatrixXd& b);

/// Conductance-related part of the injections:
/// phi_p_i = G_ii V_i^2 + sum_j G_ij V_i V_j cos(theta_ij),
/// phi_q_i = sum_j G_ij V_j sin(theta_ij).
/// Decomposition: (P, Q/V) = wb_gradient + phi.
Eigen::VectorXd phi(const OperatingPoint& op, const Eigen::MatrixXd& g);

/// Analytic Jacobian of phi (generally nonsymmetric).
Eigen::MatrixXd phi_jacobian(const OperatingPoint& op, const Eigen::MatrixXd& g);

struct NetworkIndex {
    double lambda = 0.0;            // smallest eigenvalue of `hessian`
    Eigen::MatrixXd hessian;        // the (symmetrized) matrix eigensolved
    bool lossless = true;
    Eigen::VectorXd min_eigenvector;  // diagnostic: direction attaining lambda
};

/// Network passivity index at the equilibrium. Lossless cases use the
/// Hessian of wb_tilde alone; lossy cases add the symmetrized phi Jacobian.
NetworkIndex network_lambda(const EquilibriumTriplet& triplet, const NetworkCase& net);

/// Network storage function S_N (lossless) or S_N + W_G (lossy), anchored
/// at y_star: value and gradient vanish there.
struct NetworkStorage {
    OperatingPoint y_star;
    Eigen::VectorXd sigma;  // per-bus indices
    bool lossless = true;
    Eigen::MatrixXd b;
    double wb_star = 0.0;
    Eigen::VectorXd grad_star;
    std::optional<Eigen::MatrixXd> lossy_correction;  // phi Jacobian at y_star
};

NetworkStorage make_network_storage(const EquilibriumTriplet& triplet,
                                    const NetworkCase& net,
                                    const Eigen::VectorXd& sigma);

double storage_eval(const NetworkStorage& st, const OperatingPoint& op);

/// Hessian of the stored energy at an arbitrary point (wb_hessian plus the
/// sigma weights, plus the symmetrized lossy correction when present).
Eigen::MatrixXd storage_hessian(const NetworkStorage& st, const OperatingPoint& op);

} // namespace pgrid
