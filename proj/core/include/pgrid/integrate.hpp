#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace pgrid {

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_initial = 1e-3;
    double h_min = 1e-12;
    double h_max = 0.1;
    /// > 0 selects the fixed-step classic RK4 mode (bitwise-reproducible
    /// regression baselines); 0 selects the adaptive embedded pair.
    double fixed_step = 0.0;
};

/// Time-stamped states sampled on the fixed reporting grid.
struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> x;

    const Eigen::VectorXd& back_state() const { return x.back(); }
};

using RhsFn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// Adaptive Dormand-Prince 5(4) integrator (or fixed RK4) from t0 to t_end,
/// sampling every sample_dt. Steps are clamped so that every entry of
/// `events` and every sample time is hit exactly. A DomainError thrown by
/// the rhs at the current accepted state propagates; one thrown at a trial
/// stage rejects the step instead. Throws StepSizeUnderflow when the step
/// collapses below h_min.
Trajectory integrate(const RhsFn& rhs, const Eigen::VectorXd& x0, double t0,
                     double t_end, double sample_dt,
                     const IntegratorOptions& opts = {},
                     const std::vector<double>& events = {});

} // namespace pgrid
