#pragma once

#include <Eigen/Dense>

#include "pgrid/grid_model.hpp"

namespace pgrid {

/// Bus outputs in the fixed ordering (theta_1..theta_n, v_1..v_n).
struct OperatingPoint {
    Eigen::VectorXd theta;  // bus angles, rad, relative to slack = 0
    Eigen::VectorXd v;      // voltage magnitudes, pu, > 0

    int size() const { return static_cast<int>(theta.size()); }
    Eigen::VectorXd stacked() const {
        Eigen::VectorXd y(2 * theta.size());
        y << theta, v;
        return y;
    }
};

struct PowerInjection {
    Eigen::VectorXd p;
    Eigen::VectorXd q;
};

/// Nodal injections of the standard polar power-flow equations.
PowerInjection injections(const OperatingPoint& op, const Admittance& adm);

struct PowerFlowOptions {
    double tolerance = 1e-10;  // infinity norm on the mismatch
    int max_iterations = 50;
};

/// Steady state anchoring every downstream computation. x_star is filled
/// when devices are attached (SystemModel::build); until then it is empty.
struct EquilibriumTriplet {
    OperatingPoint y_star;
    Eigen::VectorXd u_star;   // 2n: (-P*_1..-P*_n, -Q*_1/V*_1..-Q*_n/V*_n)
    Eigen::VectorXd x_star;   // full device state, empty until assembled
    Eigen::VectorXd p_star;
    Eigen::VectorXd q_star;
    int iterations = 0;
    double residual = 0.0;
};

/// Newton-Raphson in polar coordinates with the full analytic Jacobian and
/// a flat start. The load profile is scaled by net.scale before solving.
/// Throws NonConvergence or SingularJacobian.
EquilibriumTriplet solve_power_flow(const NetworkCase& net,
                                    const PowerFlowOptions& opts = {});

/// Analytic partials of (P, Q) with respect to (theta, V), 2n x 2n in the
/// fixed ordering. Shared by the Newton solver and its tests.
Eigen::MatrixXd injection_jacobian(const OperatingPoint& op, const Admittance& adm);

} // namespace pgrid
