#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "pgrid/network_energy.hpp"
#include "pgrid/system_model.hpp"

namespace pgrid {

/// Distributed stability certificate: every bus index must exceed the
/// network shortfall -lambda. A Violated verdict is one-sided — it never
/// asserts instability, only that this certificate does not apply.
struct Certificate {
    double lambda = 0.0;
    Eigen::VectorXd sigmas;
    Eigen::VectorXd per_bus_margin;  // sigma_i + lambda
    std::vector<int> violators;      // buses with non-positive margin
    bool certified = false;
};

Certificate certify(const NetworkCase& net, const EquilibriumTriplet& triplet,
                    const Eigen::VectorXd& sigmas);

/// Composite Lyapunov function: network storage plus per-device storages
/// (each normalized to vanish at its setpoint).
class LyapunovFunction {
public:
    static LyapunovFunction build(const SystemModel& sys, const NetworkCase& net);

    double eval(const Eigen::VectorXd& full_state) const;

    /// d/dt of the Lyapunov function along the system dynamics (chain rule
    /// through the analytic gradients).
    double derivative(const SystemModel& sys, const Eigen::VectorXd& full_state) const;

    /// Sum of the per-device dissipation margins phi_i(y_dot_i) at a state.
    double dissipation(const SystemModel& sys, const Eigen::VectorXd& full_state) const;

    const NetworkStorage& network() const { return network_; }
    const Eigen::VectorXd& x_star() const { return x_star_; }

    /// Conservative radius of the domain where the function stayed positive
    /// on sampled shells (radii delta_step, 2 delta_step, ...). Sampling
    /// stops at the first shell carrying a non-positive value or a sample
    /// outside the voltage domain.
    double domain_radius(std::uint64_t seed, double delta_step = 0.01,
                         double max_radius = 3.0, int samples_per_shell = 128) const;

private:
    NetworkStorage network_;
    std::vector<BusModel> models_;
    std::vector<int> offsets_;
    Eigen::VectorXd x_star_;
};

struct MonotonicityReport {
    int violations = 0;
    double max_increase = 0.0;  // largest W increase between samples
    double w_initial = 0.0;
    double w_final = 0.0;
};

/// Flag every sample where W increases by more than `tolerance`.
MonotonicityReport lyapunov_decreasing(const LyapunovFunction& lyap,
                                       const std::vector<Eigen::VectorXd>& states,
                                       double tolerance = 1e-7);

struct RegionEstimate {
    double level = 0.0;   // level value c
    double delta = 0.0;   // verified positivity radius
    std::vector<std::array<double, 2>> boundary;  // crossing points in the plane
    bool grid_too_coarse = false;
    double area = 0.0;    // area of {W <= c} within the sampled plane window
};

/// Level-set stability-region estimate projected onto the plane of two
/// state indices, other states held at their equilibrium values. The level
/// c is the minimum of W over the boundary of the positivity-verified
/// domain.
RegionEstimate estimate_region(const LyapunovFunction& lyap, const SystemModel& sys,
                               int axis_i, int axis_j, int grid_n,
                               std::uint64_t seed = 42);

} // namespace pgrid
