#pragma once

#include <optional>

#include "pgrid/integrate.hpp"
#include "pgrid/system_model.hpp"

namespace pgrid {

/// Three-phase short approximated as a large shunt conductance added at the
/// faulted bus while the fault is on; the admittance matrix is rebuilt for
/// the fault interval and the ODE structure is unchanged.
struct FaultScenario {
    int bus = 0;
    double t_on = 0.0;
    double t_clear = 0.1;
    double fault_conductance = 1e4;
};

/// Admittance with the fault shunt applied.
Admittance faulted_admittance(const Admittance& adm, const FaultScenario& fault);

/// Integrate the interconnected system from `initial`, switching the active
/// admittance over the fault interval. Fault on/clear times are hit exactly.
Trajectory simulate(const SystemModel& sys, const Eigen::VectorXd& initial,
                    double t_end, double sample_dt,
                    const IntegratorOptions& opts = {},
                    const std::optional<FaultScenario>& fault = {});

/// Post-fault stability predicate configuration. A trajectory counts as
/// stable when it stays in the domain, ends within norm_tol of the
/// equilibrium, and the windowed maxima of ||x - x*|| over the last
/// tail_window seconds do not grow.
struct StabilityPredicate {
    double horizon = 10.0;     // seconds simulated after fault clearing
    double norm_tol = 1e-3;    // ||x(T) - x*|| threshold
    double tail_window = 2.0;  // nonincreasing-tail check width
};

/// Evaluate the predicate for one clearing time.
bool post_fault_stable(const SystemModel& sys, const FaultScenario& fault,
                       const StabilityPredicate& pred = {},
                       const IntegratorOptions& opts = {});

struct CctOptions {
    double lo = 0.01;          // clearing-time bracket, seconds
    double hi = 1.0;
    double tolerance = 1e-3;   // bisection tolerance, seconds
    StabilityPredicate predicate;
    IntegratorOptions integrator;
};

struct CctResult {
    double cct = 0.0;
    int iterations = 0;
};

/// Critical clearing time by bisection. Throws NeverStable when clearing at
/// `lo` already fails the predicate, AlwaysStable when clearing at `hi`
/// still passes it.
CctResult compute_cct(const SystemModel& sys, int fault_bus, double fault_conductance,
                      const CctOptions& opts = {});

} // namespace pgrid
