#pragma once

#include <Eigen/Dense>

#include "pgrid/system_model.hpp"

namespace pgrid {

struct LinearizedSystem {
    Eigen::MatrixXd jacobian;
    Eigen::VectorXcd eigenvalues;
    double spectral_abscissa = 0.0;  // max real part
};

/// Independent small-signal oracle: Jacobian of the full closed-loop rhs at
/// the equilibrium by central finite differences (component-scaled step),
/// eigenvalues by a dense nonsymmetric solve. Deliberately not the analytic
/// route, so it cross-checks the hand-derived machinery.
LinearizedSystem linearize(const SystemModel& sys, double fd_step = 1e-6);

struct MinSigmaOptions {
    double tolerance = 1e-4;
    double bracket_below = 2.0;  // initial bracket: [-lambda - below, -lambda + above]
    double bracket_above = 5.0;
    int max_widenings = 3;
    double margin = kDefaultGainMargin;
};

struct MinSigmaResult {
    double min_sigma = 0.0;
    /// True when the lower bracket end was clamped at the gain-synthesis
    /// feasibility floor and the system was already Hurwitz there; in that
    /// case min_sigma is a one-sided upper bound on the true minimum.
    bool clamped_at_floor = false;
};

/// Exact minimal uniform sigma for small-signal stability: bisection over
/// sigma with the predicate spectral_abscissa(sigma) < 0, gains synthesized
/// at each candidate. Throws BracketError when widening cannot produce a
/// sign change at the upper end.
MinSigmaResult min_sigma_exact(const NetworkCase& net, const MinSigmaOptions& opts = {});

/// The smallest sigma at which every device's gain synthesis is feasible.
double sigma_feasibility_floor(const NetworkCase& net, const EquilibriumTriplet& triplet,
                               double margin = kDefaultGainMargin);

} // namespace pgrid
