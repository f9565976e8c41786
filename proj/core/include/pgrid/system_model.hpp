#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pgrid/bus_models.hpp"
#include "pgrid/power_flow.hpp"

namespace pgrid {

/// Per-bus passivity indices: a uniform value, or an explicit vector.
struct SigmaPolicy {
    SigmaPolicy(double uniform) : uniform_(uniform) {}
    SigmaPolicy(Eigen::VectorXd per_bus) : per_bus_(std::move(per_bus)) {}

    double at(int bus) const {
        return per_bus_.size() > 0 ? per_bus_(bus) : uniform_;
    }
    Eigen::VectorXd as_vector(int n) const {
        if (per_bus_.size() > 0) return per_bus_;
        return Eigen::VectorXd::Constant(n, uniform_);
    }

private:
    double uniform_ = 0.0;
    Eigen::VectorXd per_bus_;
};

/// Interconnection of the bus dynamics through the power network: the
/// closed feedback loop u = g(y) with per-bus device models. Immutable
/// after construction; rhs evaluation is pure and thread-safe.
class SystemModel {
public:
    /// Solve the power flow, build one model per bus (every bus must carry
    /// a device), back-compute setpoints, and assemble the state layout.
    static SystemModel build(const NetworkCase& net, const SigmaPolicy& sigma,
                             double margin = kDefaultGainMargin,
                             const PowerFlowOptions& pf_opts = {});

    /// As above but reusing an already-solved equilibrium (used by sweeps
    /// that rebuild models for many sigma values).
    static SystemModel build(const NetworkCase& net, const EquilibriumTriplet& triplet,
                             const SigmaPolicy& sigma,
                             double margin = kDefaultGainMargin);

    int bus_count() const { return static_cast<int>(models_.size()); }
    int state_dim() const { return dim_; }
    int state_offset(int bus) const { return offsets_[bus]; }

    const std::vector<BusModel>& models() const { return models_; }
    const EquilibriumTriplet& triplet() const { return triplet_; }
    const Admittance& admittance() const { return adm_; }
    bool lossless() const { return lossless_; }
    const Eigen::VectorXd& sigmas() const { return sigmas_; }

    Eigen::VectorXd equilibrium_state() const;

    /// Bus outputs (theta, V) read out of the concatenated state.
    OperatingPoint outputs(const Eigen::VectorXd& state) const;

    /// d(state)/dt under the given (possibly faulted) admittance.
    Eigen::VectorXd rhs(const Eigen::VectorXd& state, const Admittance& adm) const;
    Eigen::VectorXd rhs(const Eigen::VectorXd& state) const { return rhs(state, adm_); }

    /// Network inputs u_i = (-P_i, -Q_i/V_i) at the given state.
    Eigen::VectorXd inputs(const Eigen::VectorXd& state, const Admittance& adm) const;

    /// Index of the state holding theta_i (name "theta<i>") or V_i ("v<i>").
    int state_index_theta(int bus) const { return offsets_[bus]; }
    int state_index_v(int bus) const {
        return offsets_[bus] + state_dim_of(bus) - 1;
    }
    int state_dim_of(int bus) const { return pgrid::state_dim(models_[bus]); }

private:
    std::vector<BusModel> models_;
    std::vector<int> offsets_;
    int dim_ = 0;
    EquilibriumTriplet triplet_;
    Admittance adm_;
    bool lossless_ = true;
    Eigen::VectorXd sigmas_;
};

} // namespace pgrid
