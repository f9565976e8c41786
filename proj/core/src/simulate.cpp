#include "pgrid/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace pgrid {

Admittance faulted_admittance(const Admittance& adm, const FaultScenario& fault) {
    Admittance f = adm;
    f.g(fault.bus, fault.bus) += fault.fault_conductance;
    return f;
}

Trajectory simulate(const SystemModel& sys, const Eigen::VectorXd& initial,
                    double t_end, double sample_dt, const IntegratorOptions& opts,
                    const std::optional<FaultScenario>& fault) {
    // Fixed-regime segments with the fault on/clear instants as exact
    // boundaries; no integration step ever straddles a switching time.
    struct Segment {
        double a, b;
        bool faulted;
    };
    std::vector<Segment> segments;
    if (fault) {
        if (fault->bus < 0 || fault->bus >= sys.bus_count())
            throw ValidationError("fault bus out of range");
        if (!(fault->t_on < fault->t_clear))
            throw ValidationError("fault requires t_on < t_clear");
        if (fault->fault_conductance < 0.0)
            throw ValidationError("fault conductance must be non-negative");
        if (fault->t_on > 0.0) segments.push_back({0.0, std::min(fault->t_on, t_end), false});
        if (fault->t_on < t_end)
            segments.push_back({fault->t_on, std::min(fault->t_clear, t_end), true});
        if (fault->t_clear < t_end) segments.push_back({fault->t_clear, t_end, false});
    } else {
        segments.push_back({0.0, t_end, false});
    }

    const Admittance faulted =
        fault ? faulted_admittance(sys.admittance(), *fault) : Admittance{};

    Trajectory total;
    Eigen::VectorXd x = initial;
    for (const Segment& seg : segments) {
        const Admittance& adm = seg.faulted ? faulted : sys.admittance();
        auto rhs = [&](double, const Eigen::VectorXd& xs) { return sys.rhs(xs, adm); };
        const Trajectory part = integrate(rhs, x, seg.a, seg.b, sample_dt, opts);
        const std::size_t skip = total.t.empty() ? 0 : 1;  // segment start duplicates
        for (std::size_t k = skip; k < part.t.size(); ++k) {
            total.t.push_back(part.t[k]);
            total.x.push_back(part.x[k]);
        }
        x = part.x.back();
    }
    return total;
}

bool post_fault_stable(const SystemModel& sys, const FaultScenario& fault,
                       const StabilityPredicate& pred, const IntegratorOptions& opts) {
    const Eigen::VectorXd x_star = sys.triplet().x_star;
    const double t_end = fault.t_clear + pred.horizon;
    const double sample_dt = pred.horizon / 200.0;
    Trajectory traj;
    try {
        traj = simulate(sys, x_star, t_end, sample_dt, opts, fault);
    } catch (const DomainError&) {
        return false;  // voltage left the domain: collapse
    } catch (const StepSizeUnderflow&) {
        return false;
    }
    const double final_norm = (traj.back_state() - x_star).norm();
    if (!std::isfinite(final_norm) || final_norm >= pred.norm_tol) return false;

    // windowed maxima of ||x - x*|| must not grow over the tail
    const double t_last = traj.t.back();
    double prev_max = 0.0, tail_max = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double nrm = (traj.x[i] - x_star).norm();
        if (traj.t[i] >= t_last - pred.tail_window)
            tail_max = std::max(tail_max, nrm);
        else if (traj.t[i] >= t_last - 2.0 * pred.tail_window)
            prev_max = std::max(prev_max, nrm);
    }
    return tail_max <= prev_max + 1e-12;
}

CctResult compute_cct(const SystemModel& sys, int fault_bus, double fault_conductance,
                      const CctOptions& opts) {
    if (fault_bus < 0 || fault_bus >= sys.bus_count())
        throw ValidationError("fault bus out of range");
    if (!(opts.lo > 0.0 && opts.hi > opts.lo))
        throw ValidationError("CCT search requires 0 < lo < hi");

    auto stable_at = [&](double t_clear) {
        FaultScenario f{fault_bus, 0.0, t_clear, fault_conductance};
        return post_fault_stable(sys, f, opts.predicate, opts.integrator);
    };

    if (!stable_at(opts.lo))
        throw NeverStable("system unstable when clearing at the lower bound " +
                          std::to_string(opts.lo) + " s");
    if (stable_at(opts.hi))
        throw AlwaysStable("no unstable clearing time found below the upper bound " +
                           std::to_string(opts.hi) + " s");

    double lo = opts.lo, hi = opts.hi;
    int iters = 0;
    while (hi - lo > opts.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (stable_at(mid))
            lo = mid;
        else
            hi = mid;
        ++iters;
    }
    return CctResult{0.5 * (lo + hi), iters};
}

} // namespace pgrid
