// pgrid: stability certification for power systems with heterogeneous
// nonlinear bus dynamics. Subcommands cover power flow, the network
// passivity index, certification, stability-region estimation, time-domain
// simulation, critical clearing times, and the small-signal sweep.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pgrid/certify.hpp"
#include "pgrid/grid_model.hpp"
#include "pgrid/network_energy.hpp"
#include "pgrid/parallel.hpp"
#include "pgrid/simulate.hpp"
#include "pgrid/small_signal.hpp"
#include "pgrid/suites.hpp"
#include "pgrid/system_model.hpp"

#include "csv_out.hpp"

namespace {

using nlohmann::json;
using namespace pgrid;
using tools::format_double;

struct SweepSpec {
    double start = 0.0, stop = 0.0, step = 0.0;
};

SweepSpec parse_sweep(const std::string& text) {
    SweepSpec s;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> s.start >> c1 >> s.stop >> c2 >> s.step) || c1 != ':' || c2 != ':' ||
        s.step <= 0.0 || s.stop < s.start)
        throw CLI::ValidationError("--sweep expects start:stop:step with step > 0");
    return s;
}

std::vector<double> sweep_values(const SweepSpec& s) {
    std::vector<double> v;
    for (double x = s.start; x <= s.stop + 1e-9; x += s.step) v.push_back(x);
    return v;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct LoadedCase {
    NetworkCase net;
    std::uint64_t hash = 0;
};

LoadedCase load(const std::string& path, std::optional<double> scale) {
    const std::string bytes = slurp(path);
    LoadedCase lc;
    lc.net = parse_case(bytes);
    lc.hash = tools::fnv1a(bytes);
    if (scale) {
        lc.net.scale = *scale;
        validate(lc.net);
    }
    return lc;
}

Eigen::VectorXd sigmas_from_file(const std::string& path, int n) {
    json j = json::parse(slurp(path));
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ParseError("--sigmas file must be a JSON array of " + std::to_string(n) +
                         " numbers");
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = j[i].get<double>();
    return s;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw ParseError("cannot open output file " + path);
    return file;
}

int parse_state_axis(const SystemModel& sys, const std::string& name) {
    if (name.rfind("theta", 0) == 0)
        return sys.state_index_theta(std::stoi(name.substr(5)));
    if (name.rfind("v", 0) == 0 && name.size() > 1 && std::isdigit(name[1]))
        return sys.state_index_v(std::stoi(name.substr(1)));
    return std::stoi(name);  // raw state index
}

int run_powerflow(const std::string& path, std::optional<double> scale) {
    const LoadedCase lc = load(path, scale);
    const EquilibriumTriplet t = solve_power_flow(lc.net);
    json out;
    out["theta"] = std::vector<double>(t.y_star.theta.begin(), t.y_star.theta.end());
    out["v"] = std::vector<double>(t.y_star.v.begin(), t.y_star.v.end());
    out["p"] = std::vector<double>(t.p_star.begin(), t.p_star.end());
    out["q"] = std::vector<double>(t.q_star.begin(), t.q_star.end());
    out["iterations"] = t.iterations;
    out["residual"] = t.residual;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_lambda(const std::string& path, std::optional<double> scale,
               const std::string& sweep_text, const std::string& csv_path) {
    if (sweep_text.empty()) {
        const LoadedCase lc = load(path, scale);
        const EquilibriumTriplet t = solve_power_flow(lc.net);
        const NetworkIndex idx = network_lambda(t, lc.net);
        std::cout << "lambda = " << format_double(idx.lambda)
                  << "\n-lambda = " << format_double(-idx.lambda)
                  << (idx.lossless ? "  (lossless)" : "  (lossy)") << "\n";
        return 0;
    }
    const SweepSpec spec = parse_sweep(sweep_text);
    const std::vector<double> scales = sweep_values(spec);
    const LoadedCase base = load(path, std::nullopt);
    std::vector<double> lambdas(scales.size());
    parallel_for(static_cast<int>(scales.size()), [&](int i) {
        NetworkCase net = base.net;
        net.scale = scales[i];
        lambdas[i] = network_lambda(solve_power_flow(net), net).lambda;
    });
    std::ofstream file;
    std::ostream& os = open_out(file, csv_path);
    tools::write_csv_metadata(os, base.hash, base.net.scale, "n/a");
    os << "s,lambda\n";
    for (std::size_t i = 0; i < scales.size(); ++i)
        os << format_double(scales[i]) << "," << format_double(lambdas[i]) << "\n";
    return 0;
}

int run_certify(const std::string& path, std::optional<double> scale,
                std::optional<double> sigma, const std::string& sigmas_path) {
    const LoadedCase lc = load(path, scale);
    const EquilibriumTriplet t = solve_power_flow(lc.net);
    Eigen::VectorXd sigmas;
    if (!sigmas_path.empty())
        sigmas = sigmas_from_file(sigmas_path, lc.net.size());
    else if (sigma)
        sigmas = Eigen::VectorXd::Constant(lc.net.size(), *sigma);
    else
        throw CLI::ValidationError("certify requires --sigma or --sigmas");
    // honor per-device overrides from the case file
    for (const DeviceSpec& d : lc.net.devices)
        if (d.sigma) sigmas(d.bus) = *d.sigma;

    const Certificate cert = certify(lc.net, t, sigmas);
    json out;
    out["lambda"] = cert.lambda;
    out["verdict"] = cert.certified ? "Certified" : "Violated";
    out["margins"] = std::vector<double>(cert.per_bus_margin.begin(), cert.per_bus_margin.end());
    if (!cert.certified) out["violators"] = cert.violators;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_region(const std::string& path, std::optional<double> scale, double sigma,
               const std::string& axes_text, int grid_n, const std::string& out_path,
               std::uint64_t seed) {
    const LoadedCase lc = load(path, scale);
    const SystemModel sys = SystemModel::build(lc.net, SigmaPolicy(sigma));
    const Certificate cert = certify(lc.net, sys.triplet(), sys.sigmas());
    if (!cert.certified)
        throw ValidationError("region estimation requires a certified system (sigma <= " +
                              std::to_string(-cert.lambda) + " at some bus)");

    const auto comma = axes_text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--axes expects two names, e.g. theta1,theta2");
    const int ai = parse_state_axis(sys, axes_text.substr(0, comma));
    const int aj = parse_state_axis(sys, axes_text.substr(comma + 1));

    const LyapunovFunction lyap = LyapunovFunction::build(sys, lc.net);
    const RegionEstimate est = estimate_region(lyap, sys, ai, aj, grid_n, seed);
    if (est.grid_too_coarse)
        std::cerr << "warning: GridTooCoarse - level-set boundary unresolved on a " +
                         std::to_string(grid_n) + "x" + std::to_string(grid_n) + " grid\n";

    std::ofstream file;
    std::ostream& os = open_out(file, out_path);
    tools::write_csv_metadata(os, lc.hash, lc.net.scale, format_double(sigma));
    os << "axis_i_offset,axis_j_offset\n";
    for (const auto& pt : est.boundary)
        os << format_double(pt[0]) << "," << format_double(pt[1]) << "\n";
    std::cerr << "level c = " << format_double(est.level)
              << ", domain radius = " << format_double(est.delta)
              << ", boundary points = " << est.boundary.size() << "\n";
    return 0;
}

int run_simulate(const std::string& path, std::optional<double> scale, double sigma,
                 const std::string& fault_text, double t_end, double dt,
                 double fixed_step, const std::string& out_path) {
    const LoadedCase lc = load(path, scale);
    const SystemModel sys = SystemModel::build(lc.net, SigmaPolicy(sigma));

    std::optional<FaultScenario> fault;
    if (!fault_text.empty()) {
        FaultScenario f;
        char c;
        std::istringstream is(fault_text);
        if (!(is >> f.bus >> c >> f.t_on >> c >> f.t_clear))
            throw CLI::ValidationError("--fault expects bus,t_on,t_clear[,conductance]");
        if (is >> c >> f.fault_conductance) {
        }
        fault = f;
    }

    IntegratorOptions opts;
    opts.fixed_step = fixed_step;
    const Trajectory traj =
        simulate(sys, sys.triplet().x_star, t_end, dt, opts, fault);

    const LyapunovFunction lyap = LyapunovFunction::build(sys, lc.net);
    std::ofstream file;
    std::ostream& os = open_out(file, out_path);
    tools::write_csv_metadata(os, lc.hash, lc.net.scale, format_double(sigma));
    os << "t";
    for (int i = 0; i < sys.bus_count(); ++i) os << ",theta" << i;
    for (int i = 0; i < sys.bus_count(); ++i) os << ",v" << i;
    for (int i = 0; i < sys.bus_count(); ++i)
        if (sys.state_dim_of(i) == 3) os << ",omega" << i;
    os << ",W\n";
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const OperatingPoint op = sys.outputs(traj.x[k]);
        os << format_double(traj.t[k]);
        for (int i = 0; i < sys.bus_count(); ++i) os << "," << format_double(op.theta(i));
        for (int i = 0; i < sys.bus_count(); ++i) os << "," << format_double(op.v(i));
        for (int i = 0; i < sys.bus_count(); ++i)
            if (sys.state_dim_of(i) == 3)
                os << "," << format_double(traj.x[k](sys.state_offset(i) + 1));
        double w;
        try {
            w = lyap.eval(traj.x[k]);
        } catch (const DomainError&) {
            w = std::numeric_limits<double>::quiet_NaN();
        }
        os << "," << format_double(w) << "\n";
    }
    return 0;
}

int run_cct(const std::string& path, std::optional<double> scale, double sigma,
            int fault_bus, double gf, CctOptions opts) {
    const LoadedCase lc = load(path, scale);
    const SystemModel sys = SystemModel::build(lc.net, SigmaPolicy(sigma));
    if (linearize(sys).spectral_abscissa >= 0.0)
        throw ValidationError("unfaulted system is not small-signal stable at sigma = " +
                              std::to_string(sigma));
    const CctResult res = compute_cct(sys, fault_bus, gf, opts);
    json out;
    out["cct"] = res.cct;
    out["iterations"] = res.iterations;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_eigscan(const std::string& path, const std::string& sweep_text,
                const std::string& csv_path) {
    const SweepSpec spec = parse_sweep(sweep_text);
    const std::vector<double> scales = sweep_values(spec);
    const LoadedCase base = load(path, std::nullopt);
    struct Row {
        double lambda, min_sigma;
    };
    std::vector<Row> rows(scales.size());
    parallel_for(static_cast<int>(scales.size()), [&](int i) {
        NetworkCase net = base.net;
        net.scale = scales[i];
        const EquilibriumTriplet t = solve_power_flow(net);
        rows[i].lambda = network_lambda(t, net).lambda;
        rows[i].min_sigma = min_sigma_exact(net).min_sigma;
    });
    std::ofstream file;
    std::ostream& os = open_out(file, csv_path);
    tools::write_csv_metadata(os, base.hash, base.net.scale, "synthesized per sigma");
    os << "s,lambda,neg_lambda,min_sigma_exact\n";
    for (std::size_t i = 0; i < scales.size(); ++i)
        os << format_double(scales[i]) << "," << format_double(rows[i].lambda) << ","
           << format_double(-rows[i].lambda) << "," << format_double(rows[i].min_sigma)
           << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed passivity-based stability certification for power grids"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string case_path, sweep_text, csv_path, sigmas_path, axes_text, fault_text,
        out_path;
    std::optional<double> scale, sigma_opt;
    double sigma = 0.0, t_end = 10.0, dt = 0.01, fixed_step = 0.0, gf = 1e4;
    int grid_n = 200, fault_bus = 0;
    std::uint64_t seed = 42;
    CctOptions cct_opts;

    auto add_case = [&](CLI::App* cmd) {
        cmd->add_option("case", case_path, "case file (JSON)")->required();
    };

    CLI::App* pf = app.add_subcommand("powerflow", "solve the steady-state power flow");
    add_case(pf);
    pf->add_option("--scale", scale, "override the load scale factor");

    CLI::App* lam = app.add_subcommand("lambda", "network passivity index at equilibrium");
    add_case(lam);
    lam->add_option("--scale", scale, "override the load scale factor");
    lam->add_option("--sweep", sweep_text, "scale sweep start:stop:step");
    lam->add_option("--csv", csv_path, "sweep output CSV (default stdout)");

    CLI::App* cert = app.add_subcommand("certify", "distributed stability certificate");
    add_case(cert);
    cert->add_option("--scale", scale, "override the load scale factor");
    cert->add_option("--sigma", sigma_opt, "uniform passivity index");
    cert->add_option("--sigmas", sigmas_path, "JSON array of per-bus indices");

    CLI::App* reg = app.add_subcommand("region", "level-set stability-region estimate");
    add_case(reg);
    reg->add_option("--scale", scale, "override the load scale factor");
    reg->add_option("--sigma", sigma, "uniform passivity index")->required();
    reg->add_option("--axes", axes_text, "projection plane, e.g. theta1,theta2")->required();
    reg->add_option("--grid", grid_n, "grid resolution per axis");
    reg->add_option("--out", out_path, "boundary CSV (default stdout)");
    reg->add_option("--seed", seed, "rng seed for shell sampling");

    CLI::App* sim = app.add_subcommand("simulate", "time-domain simulation from equilibrium");
    add_case(sim);
    sim->add_option("--scale", scale, "override the load scale factor");
    sim->add_option("--sigma", sigma, "uniform passivity index")->required();
    sim->add_option("--fault", fault_text, "fault spec bus,t_on,t_clear[,conductance]");
    sim->add_option("--tend", t_end, "simulation horizon, s");
    sim->add_option("--dt", dt, "reporting sample interval, s");
    sim->add_option("--fixed-step", fixed_step, "use fixed-step RK4 with this step, s");
    sim->add_option("--out", out_path, "trajectory CSV (default stdout)");

    CLI::App* cct = app.add_subcommand("cct", "critical clearing time by bisection");
    add_case(cct);
    cct->add_option("--scale", scale, "override the load scale factor");
    cct->add_option("--sigma", sigma, "uniform passivity index")->required();
    cct->add_option("--fault-bus", fault_bus, "bus where the fault is applied")->required();
    cct->add_option("--gf", gf, "fault shunt conductance, pu");
    cct->add_option("--lo", cct_opts.lo, "clearing-time lower bound, s");
    cct->add_option("--hi", cct_opts.hi, "clearing-time upper bound, s");
    cct->add_option("--tol", cct_opts.tolerance, "bisection tolerance, s");
    cct->add_option("--horizon", cct_opts.predicate.horizon, "post-clear horizon, s");
    cct->add_option("--norm-tol", cct_opts.predicate.norm_tol, "stability norm threshold");
    cct->add_option("--tail", cct_opts.predicate.tail_window, "nonincreasing-tail window, s");

    CLI::App* eig = app.add_subcommand("eigscan", "lambda and exact minimal sigma over a scale sweep");
    add_case(eig);
    eig->add_option("--sweep", sweep_text, "scale sweep start:stop:step")->required();
    eig->add_option("--csv", csv_path, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (pf->parsed()) return run_powerflow(case_path, scale);
        if (lam->parsed()) return run_lambda(case_path, scale, sweep_text, csv_path);
        if (cert->parsed()) return run_certify(case_path, scale, sigma_opt, sigmas_path);
        if (reg->parsed())
            return run_region(case_path, scale, sigma, axes_text, grid_n, out_path, seed);
        if (sim->parsed())
            return run_simulate(case_path, scale, sigma, fault_text, t_end, dt, fixed_step,
                                out_path);
        if (cct->parsed()) return run_cct(case_path, scale, sigma, fault_bus, gf, cct_opts);
        if (eig->parsed()) return run_eigscan(case_path, sweep_text, csv_path);
    } catch (const pgrid::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
