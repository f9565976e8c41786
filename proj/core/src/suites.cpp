#include "pgrid/suites.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pgrid {

namespace {

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

// Ordinals (QD1.., CD1..) follow device appearance order in the case file,
// so augmented variants can append devices without renumbering the base set.
std::vector<const DeviceSpec*> devices_of_kind(const NetworkCase& net, DeviceKind kind) {
    std::vector<const DeviceSpec*> out;
    for (const DeviceSpec& d : net.devices)
        if (d.kind == kind) out.push_back(&d);
    return out;
}

// Table of droop time constants used across the 39-bus studies.
const std::vector<DroopConstant> kTable39 = {
    {DeviceKind::QD, 1, 0.3, 7.0},  {DeviceKind::QD, 2, 0.2, 7.5},
    {DeviceKind::QD, 3, 0.13, 8.0}, {DeviceKind::QD, 4, 0.26, 8.2},
    {DeviceKind::QD, 5, 0.4, 8.5},  {DeviceKind::QD, 6, 0.2, 6.5},
    {DeviceKind::QD, 7, 0.25, 9.2}, {DeviceKind::QD, 8, 0.35, 9.6},
    {DeviceKind::CD, 1, 0.3, 8.1},  {DeviceKind::CD, 2, 0.25, 9.0},
    {DeviceKind::CD, 3, 0.15, 9.5}, {DeviceKind::CD, 4, 0.28, 9.3},
    {DeviceKind::CD, 5, 0.34, 10.0}, {DeviceKind::CD, 6, 0.22, 9.5},
    {DeviceKind::CD, 7, 0.4, 7.0},  {DeviceKind::CD, 8, 0.5, 6.5},
};

ExperimentSuite suite39(const std::string& name, int devices, int sg, int cd, int qd,
                        int dim) {
    ExperimentSuite s;
    s.name = name;
    s.case_file = name + ".json";
    s.expected_devices = devices;
    s.expected_sg = sg;
    s.expected_cd = cd;
    s.expected_qd = qd;
    s.expected_state_dim = dim;
    s.droop_constants = kTable39;
    // augmented devices reuse the table cyclically
    if (cd >= 9) {
        s.droop_constants.push_back({DeviceKind::CD, 9, 0.3, 8.1});
        s.droop_constants.push_back({DeviceKind::QD, 9, 0.3, 7.0});
    }
    if (cd >= 10) {
        s.droop_constants.push_back({DeviceKind::CD, 10, 0.25, 9.0});
        s.droop_constants.push_back({DeviceKind::QD, 10, 0.2, 7.5});
    }
    for (double sc = 0.5; sc <= 2.0 + 1e-9; sc += 0.25) s.scale_sweep.push_back(sc);
    // conventional-droop load buses; conductance picked so the clearing-time
    // search has a genuine separatrix at every studied sigma
    s.fault_set = {
        FaultScenario{10, 0.0, 0.1, 300.0},
        FaultScenario{11, 0.0, 0.1, 300.0},
        FaultScenario{14, 0.0, 0.1, 300.0},
    };
    return s;
}

} // namespace

ExperimentSuite builtin_suite(const std::string& name) {
    if (name == "case3") {
        ExperimentSuite s;
        s.name = "case3";
        s.case_file = "case3.json";
        s.expected_devices = 3;
        s.expected_sg = 1;
        s.expected_cd = 1;
        s.expected_qd = 1;
        s.expected_state_dim = 7;
        s.sg_constants = {{0.16, 0.076, 6.56, 0.295, 0.17}};
        s.droop_constants = {{DeviceKind::CD, 1, 1.0, 10.0}, {DeviceKind::QD, 1, 0.7, 8.0}};
        for (double sc = 0.5; sc <= 2.5 + 1e-9; sc += 0.25) s.scale_sweep.push_back(sc);
        s.fault_set = {FaultScenario{2, 0.0, 0.1, 100.0}};
        return s;
    }
    if (name == "case39_22") return suite39(name, 22, 6, 8, 8, 50);
    if (name == "case39_24") return suite39(name, 24, 6, 9, 9, 54);
    if (name == "case39_26") return suite39(name, 26, 6, 10, 10, 58);
    throw SuiteError("unknown suite '" + name + "'");
}

std::vector<std::string> builtin_suite_names() {
    return {"case3", "case39_22", "case39_24", "case39_26"};
}

SuiteReport validate_suite(const ExperimentSuite& suite, const NetworkCase& net) {
    SuiteReport rep;
    auto mismatch = [&](const std::string& msg) {
        rep.ok = false;
        rep.mismatches.push_back(msg);
    };

    rep.device_count = static_cast<int>(net.devices.size());
    if (rep.device_count != suite.expected_devices)
        mismatch("expected " + std::to_string(suite.expected_devices) + " devices, found " +
                 std::to_string(rep.device_count));

    const int n = net.size();
    int counts[3] = {0, 0, 0};
    for (const DeviceSpec& d : net.devices) {
        if (d.bus < 0 || d.bus >= n)
            mismatch("device on nonexistent bus " + std::to_string(d.bus));
        counts[static_cast<int>(d.kind)]++;
        rep.state_dim += d.kind == DeviceKind::SG ? 3 : 2;
    }
    if (counts[static_cast<int>(DeviceKind::SG)] != suite.expected_sg)
        mismatch("expected " + std::to_string(suite.expected_sg) + " SG devices");
    if (counts[static_cast<int>(DeviceKind::CD)] != suite.expected_cd)
        mismatch("expected " + std::to_string(suite.expected_cd) + " CD devices");
    if (counts[static_cast<int>(DeviceKind::QD)] != suite.expected_qd)
        mismatch("expected " + std::to_string(suite.expected_qd) + " QD devices");
    if (suite.expected_state_dim != 0 && rep.state_dim != suite.expected_state_dim)
        mismatch("expected state dimension " + std::to_string(suite.expected_state_dim) +
                 ", assembled " + std::to_string(rep.state_dim));

    for (const DroopConstant& dc : suite.droop_constants) {
        const auto list = devices_of_kind(net, dc.kind);
        if (dc.ordinal < 1 || dc.ordinal > static_cast<int>(list.size())) {
            mismatch(std::string(to_string(dc.kind)) + std::to_string(dc.ordinal) +
                     " missing from the case");
            continue;
        }
        const DeviceSpec& d = *list[dc.ordinal - 1];
        if (!close(d.droop.tau1, dc.tau1) || !close(d.droop.tau2, dc.tau2)) {
            std::ostringstream os;
            os << to_string(dc.kind) << dc.ordinal << " time constants (" << d.droop.tau1
               << ", " << d.droop.tau2 << ") differ from (" << dc.tau1 << ", " << dc.tau2
               << ")";
            mismatch(os.str());
        }
    }

    if (!suite.sg_constants.empty()) {
        const auto sgs = devices_of_kind(net, DeviceKind::SG);
        for (std::size_t k = 0; k < suite.sg_constants.size(); ++k) {
            if (k >= sgs.size()) {
                mismatch("SG" + std::to_string(k + 1) + " missing from the case");
                continue;
            }
            const SgConstant& c = suite.sg_constants[k];
            const SgParams& p = sgs[k]->sg;
            if (!close(p.m, c.m) || !close(p.d, c.d) || !close(p.td_prime, c.td_prime) ||
                !close(p.xd, c.xd) || !close(p.xd_prime, c.xd_prime))
                mismatch("SG" + std::to_string(k + 1) + " constants differ from the table");
        }
    }

    for (const FaultScenario& f : suite.fault_set)
        if (f.bus < 0 || f.bus >= n)
            mismatch("fault scenario references nonexistent bus " + std::to_string(f.bus));

    return rep;
}

void require_valid_suite(const ExperimentSuite& suite, const NetworkCase& net) {
    const SuiteReport rep = validate_suite(suite, net);
    if (!rep.ok) {
        std::string msg = "suite '" + suite.name + "' validation failed:";
        for (const std::string& m : rep.mismatches) msg += "\n  - " + m;
        throw SuiteError(msg);
    }
}

} // namespace pgrid
