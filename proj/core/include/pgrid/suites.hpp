#pragma once

#include <string>
#include <vector>

#include "pgrid/grid_model.hpp"
#include "pgrid/simulate.hpp"

namespace pgrid {

/// Named time-constant expectation: the k-th device of a kind (in bus-id
/// order) must carry exactly these constants.
struct DroopConstant {
    DeviceKind kind;
    int ordinal;  // 1-based: QD1..QD8, CD1..CD8
    double tau1;
    double tau2;
};

struct SgConstant {
    double m, d, td_prime, xd, xd_prime;
};

/// One shipped experiment definition: case file plus the expectations and
/// scenarios the paper-style studies run against it.
struct ExperimentSuite {
    std::string name;
    std::string case_file;  // relative to the cases directory
    int expected_devices = 0;
    int expected_state_dim = 0;
    int expected_sg = 0;
    int expected_cd = 0;
    int expected_qd = 0;
    std::vector<DroopConstant> droop_constants;
    std::vector<SgConstant> sg_constants;  // checked in bus order when non-empty
    std::vector<double> scale_sweep;
    std::vector<FaultScenario> fault_set;
};

struct SuiteReport {
    bool ok = true;
    int device_count = 0;
    int state_dim = 0;
    std::vector<std::string> mismatches;
};

/// Check the case against the suite expectations; collects every mismatch.
SuiteReport validate_suite(const ExperimentSuite& suite, const NetworkCase& net);

/// As above but throwing SuiteError when anything mismatches.
void require_valid_suite(const ExperimentSuite& suite, const NetworkCase& net);

/// Shipped suites: "case3", "case39_22", "case39_24", "case39_26".
ExperimentSuite builtin_suite(const std::string& name);
std::vector<std::string> builtin_suite_names();

} // namespace pgrid
