#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>

#include "pgrid/grid_model.hpp"

namespace pgrid {

// Concrete bus dynamics. Every model maps the network input
// u_i = (-P_i, -Q_i/V_i) to the output y_i = (theta_i, V_i). For the SG the
// bus output pair is (delta, E_q'): the rotor angle and the q-axis transient
// internal voltage play the roles of theta and V in the network-reduced
// model. That convention differs from terminal-bus SG models; the supply
// rate below uses Q/E_q' accordingly.

/// Flux-decay synchronous generator, state (delta, omega, eq_prime), with
/// the PI power control realized through delta (the integral of omega) and
/// proportional excitation feedback.
struct SgModel {
    SgParams par;
    SgGains gains;
    double sigma = 0.0;
    // setpoints, back-computed so the model is exactly at equilibrium
    double delta_star = 0.0;
    double eq_star = 1.0;
    double p_star = 0.0;
    double q_star = 0.0;
    double pg_star = 0.0;
    double ef_star = 0.0;
};

/// Conventional P-theta / Q-V droop, state = output = (theta, v).
struct CdModel {
    DroopParams par;
    DroopGains gains;
    double sigma = 0.0;
    double theta_star = 0.0;
    double v_star = 1.0;
    double p_star = 0.0;
    double q_star = 0.0;
};

/// Quadratic droop, state = output = (theta, v); u_star is the derived
/// voltage reference making the setpoint an equilibrium.
struct QdModel {
    DroopParams par;
    DroopGains gains;
    double sigma = 0.0;
    double theta_star = 0.0;
    double v_star = 1.0;
    double p_star = 0.0;
    double q_star = 0.0;
    double u_star = 1.0;
};

using BusModel = std::variant<SgModel, CdModel, QdModel>;

int state_dim(const BusModel& model);
DeviceKind kind_of(const BusModel& model);
double sigma_of(const BusModel& model);

/// Equilibrium state of the device, matching its setpoints.
Eigen::VectorXd equilibrium_state(const BusModel& model);

/// Bus output (theta, V) extracted from the device state.
Eigen::Vector2d output_of(const BusModel& model, const Eigen::VectorXd& state);

/// Right-hand side dx/dt given the network input u = (-P, -Q/V).
/// Throws DomainError when a voltage-like state is non-positive.
Eigen::VectorXd rhs(const BusModel& model, const Eigen::VectorXd& state,
                    const Eigen::Vector2d& u);

/// Storage function of the matching dissipation proof, normalized to
/// vanish at the setpoint (the conventional-droop storage carries a
/// constant offset in its raw form).
double storage(const BusModel& model, const Eigen::VectorXd& state);

Eigen::VectorXd storage_gradient(const BusModel& model, const Eigen::VectorXd& state);

struct SupplyResidual {
    double s_dot = 0.0;    // d/dt of the storage along the dynamics
    double supply = 0.0;   // -(P-P*)theta_dot - (Q/V - Q*/V*)V_dot - sigma (y-y*).y_dot
    double phi = 0.0;      // dissipation margin phi(y_dot), positive definite
    double residual = 0.0; // s_dot - supply + phi; identically 0 for these models
};

SupplyResidual supply_residual(const BusModel& model, const Eigen::VectorXd& state,
                               const Eigen::Vector2d& u);

// Gain synthesis: tightest gains with a fixed headroom above the strict
// bounds, so synthesized systems are strictly (not marginally) dissipative.
inline constexpr double kDefaultGainMargin = 0.05;

SgGains synthesize_sg_gains(const SgParams& par, double sigma,
                            double margin = kDefaultGainMargin);
/// Throws InfeasibleGain when the bound forces a non-positive droop gain.
DroopGains synthesize_cd_gains(double sigma, double v_star, double q_star,
                               double margin = kDefaultGainMargin);
DroopGains synthesize_qd_gains(double sigma, double margin = kDefaultGainMargin);

/// Bound-verification predicate: do the model's gains satisfy the strict
/// inequalities required for the given index?
bool gains_satisfy(const BusModel& model, double sigma);

/// Smallest sigma for which gain synthesis at the given margin produces
/// positive gains (-inf for the SG, whose gains have no positivity bound).
double synthesis_floor(const DeviceSpec& spec, double v_star, double q_star,
                       double margin = kDefaultGainMargin);

struct ObservabilityWitness {
    bool ok = false;
    std::string reason;
};

/// Steady output implies steady state. Droops satisfy it structurally;
/// the SG witness clamps the outputs and checks that the internal
/// frequency state and its derivative decay to zero.
ObservabilityWitness check_steady_state_observability(const BusModel& model);

/// Construct a model from its file-level spec and the solved equilibrium
/// at its bus. Missing gains are synthesized for sigma (the device's own,
/// or sigma_global when unset).
BusModel make_model(const DeviceSpec& spec, double theta_star, double v_star,
                    double p_star, double q_star, double sigma_global,
                    double margin = kDefaultGainMargin);

} // namespace pgrid
