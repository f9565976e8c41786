#include "pgrid/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pgrid/errors.hpp"

namespace pgrid {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

/// Merged, sorted list of hard stop times (samples, events, t_end).
std::vector<double> build_stops(double t0, double t_end, double sample_dt,
                                const std::vector<double>& events) {
    std::vector<double> stops;
    if (sample_dt > 0.0) {
        for (double t = t0 + sample_dt; t < t_end - 1e-14; t += sample_dt)
            stops.push_back(t);
    }
    for (double ev : events)
        if (ev > t0 && ev < t_end) stops.push_back(ev);
    stops.push_back(t_end);
    std::sort(stops.begin(), stops.end());
    // collapse stops closer than the time resolution
    std::vector<double> out;
    for (double s : stops)
        if (out.empty() || s - out.back() > 1e-12) out.push_back(s);
    return out;
}

bool is_sample_time(double t, double t0, double t_end, double sample_dt) {
    if (std::abs(t - t_end) < 1e-12) return true;
    if (sample_dt <= 0.0) return false;
    const double k = (t - t0) / sample_dt;
    return std::abs(k - std::round(k)) < 1e-9;
}

} // namespace

Trajectory integrate(const RhsFn& rhs, const Eigen::VectorXd& x0, double t0,
                     double t_end, double sample_dt, const IntegratorOptions& opts,
                     const std::vector<double>& events) {
    if (!(t_end > t0)) throw ValidationError("integrate: t_end must exceed t0");
    const int n = static_cast<int>(x0.size());

    Trajectory traj;
    traj.t.push_back(t0);
    traj.x.push_back(x0);

    const std::vector<double> stops = build_stops(t0, t_end, sample_dt, events);
    std::size_t next_stop = 0;

    Eigen::VectorXd x = x0;
    double t = t0;

    if (opts.fixed_step > 0.0) {
        // Classic RK4 with steps clamped to the stop grid.
        while (t < t_end - 1e-14) {
            const double stop = stops[next_stop];
            const double h = std::min(opts.fixed_step, stop - t);
            const Eigen::VectorXd k1 = rhs(t, x);
            const Eigen::VectorXd k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
            const Eigen::VectorXd k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
            const Eigen::VectorXd k4 = rhs(t + h, x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            if (t >= stop - 1e-12) {
                t = stop;
                ++next_stop;
                if (is_sample_time(t, t0, t_end, sample_dt)) {
                    traj.t.push_back(t);
                    traj.x.push_back(x);
                }
            }
        }
        return traj;
    }

    double h = std::min(opts.h_initial, opts.h_max);
    std::array<Eigen::VectorXd, 7> k;
    while (t < t_end - 1e-14) {
        const double stop = stops[next_stop];
        h = std::min({h, opts.h_max, stop - t});
        if (h < opts.h_min) throw StepSizeUnderflow(t);

        bool stage_domain_failure = false;
        k[0] = rhs(t, x);  // a DomainError here reflects the accepted state: propagate
        Eigen::VectorXd x_new;
        try {
            for (int s = 1; s < 7; ++s) {
                Eigen::VectorXd xs = x;
                for (int j = 0; j < s; ++j) xs += h * kA[s][j] * k[j];
                k[s] = rhs(t + kC[s] * h, xs);
            }
            x_new = x;
            for (int s = 0; s < 7; ++s)
                if (kB5[s] != 0.0) x_new += h * kB5[s] * k[s];
        } catch (const DomainError&) {
            stage_domain_failure = true;  // trial state left the domain: shrink
        }

        if (stage_domain_failure) {
            h *= 0.5;
            continue;
        }

        // weighted RMS error of the embedded 4th-order difference
        double err_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            double e = 0.0;
            for (int s = 0; s < 7; ++s) e += (kB5[s] - kB4[s]) * k[s](i);
            e *= h;
            const double sc = opts.atol + opts.rtol * std::max(std::abs(x(i)), std::abs(x_new(i)));
            err_sq += (e / sc) * (e / sc);
        }
        const double err = std::sqrt(err_sq / n);

        if (err <= 1.0 || h <= opts.h_min * 2.0) {
            t += h;
            x = std::move(x_new);
            if (t >= stop - 1e-12) {
                t = stop;
                ++next_stop;
                if (is_sample_time(t, t0, t_end, sample_dt)) {
                    traj.t.push_back(t);
                    traj.x.push_back(x);
                }
            }
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < opts.h_min) throw StepSizeUnderflow(t);
    }
    return traj;
}

} // namespace pgrid
