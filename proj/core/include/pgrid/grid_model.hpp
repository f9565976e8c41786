#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pgrid/errors.hpp"

namespace pgrid {

enum class BusRole { Slack, PV, PQ };

enum class DeviceKind { SG, CD, QD };

struct Bus {
    int id = 0;
    double shunt_g = 0.0;  // per-unit conductance to ground
    double shunt_b = 0.0;  // per-unit susceptance to ground
    BusRole role = BusRole::PQ;
    double v_set = 1.0;    // voltage magnitude held at Slack/PV buses
};

/// Series branch; parallel lines are merged at ingestion so an unordered
/// pair appears at most once.
struct Line {
    int from = 0;
    int to = 0;
    double r = 0.0;  // per-unit series resistance, >= 0
    double x = 0.0;  // per-unit series reactance, > 0
};

struct LoadSpec {
    int bus = 0;
    double p = 0.0;  // signed injection: positive feeds the network
    double q = 0.0;
};

/// Synchronous generator flux-decay constants.
struct SgParams {
    double m = 0.0;         // inertia, s^2/rad pu
    double d = 0.0;         // damping, pu
    double td_prime = 0.0;  // q-axis open-circuit transient time constant, s
    double xd = 0.0;        // d-axis synchronous reactance, pu
    double xd_prime = 0.0;  // d-axis transient reactance, pu (< xd)
};

struct SgGains {
    double ki = 0.0;
    double kp = 0.0;
    double ke = 0.0;
};

struct DroopParams {
    double tau1 = 0.0;  // angle time constant, s
    double tau2 = 0.0;  // voltage time constant, s
};

struct DroopGains {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Device entry as read from a case file; setpoints and missing gains are
/// filled in from the solved power flow when the system is assembled.
struct DeviceSpec {
    int bus = 0;
    DeviceKind kind = DeviceKind::CD;
    SgParams sg;           // valid when kind == SG
    DroopParams droop;     // valid when kind == CD/QD
    std::optional<SgGains> sg_gains;
    std::optional<DroopGains> droop_gains;
    std::optional<double> sigma;  // per-device index; empty = use global
};

struct NetworkCase {
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<LoadSpec> loads;
    double scale = 1.0;  // load scale factor applied to the load profile
    std::vector<DeviceSpec> devices;

    int size() const { return static_cast<int>(buses.size()); }
};

struct Admittance {
    Eigen::MatrixXd g;  // Re(Y)
    Eigen::MatrixXd b;  // Im(Y)
};

/// Parse and validate a case file. Throws ParseError on malformed input,
/// ValidationError when an invariant fails.
NetworkCase load_case(const std::filesystem::path& path);

/// Parse from an in-memory JSON string (the file-free path used in tests).
NetworkCase parse_case(const std::string& json_text);

/// Check all structural invariants: contiguous ids, exactly one slack,
/// no self-loops or duplicate pairs, positive reactances, connectivity.
void validate(const NetworkCase& net);

/// Dense nodal admittance Y = G + jB from series branches and bus shunts.
Admittance build_admittance(const NetworkCase& net);

/// True iff every line is purely reactive and no bus has shunt conductance.
bool is_lossless(const NetworkCase& net);

const char* to_string(BusRole role);
const char* to_string(DeviceKind kind);

} // namespace pgrid
