#include <doctest.h>

#include "pgrid/suites.hpp"
#include "pgrid/system_model.hpp"
#include "test_util.hpp"

using namespace pgrid;
using namespace pgrid::testutil;

TEST_CASE("all shipped suites validate") {
    for (const std::string& name : builtin_suite_names()) {
        const ExperimentSuite suite = builtin_suite(name);
        const NetworkCase net = load_shipped(suite.case_file);
        const SuiteReport rep = validate_suite(suite, net);
        for (const std::string& m : rep.mismatches) MESSAGE(name, ": ", m);
        CHECK(rep.ok);
    }
}

TEST_CASE("device counts across the 39-bus family") {
    CHECK(validate_suite(builtin_suite("case39_22"),
                         load_shipped("case39_22.json")).device_count == 22);
    CHECK(validate_suite(builtin_suite("case39_24"),
                         load_shipped("case39_24.json")).device_count == 24);
    CHECK(validate_suite(builtin_suite("case39_26"),
                         load_shipped("case39_26.json")).device_count == 26);
}

TEST_CASE("the 22-device system assembles exactly 50 states") {
    const NetworkCase net = load_shipped("case39_22.json");
    const SystemModel sys = SystemModel::build(net, SigmaPolicy(2.5));
    CHECK(sys.state_dim() == 50);
    CHECK(validate_suite(builtin_suite("case39_22"), net).state_dim == 50);
}

TEST_CASE("a device on a nonexistent bus fails suite validation") {
    NetworkCase net = load_shipped("case39_22.json");
    net.devices[3].bus = 99;  // bypass load_case validation on purpose
    const SuiteReport rep = validate_suite(builtin_suite("case39_22"), net);
    CHECK_FALSE(rep.ok);
    CHECK_THROWS_AS(require_valid_suite(builtin_suite("case39_22"), net), SuiteError);
}

TEST_CASE("table expectations catch perturbed constants") {
    NetworkCase net = load_shipped("case39_22.json");
    for (DeviceSpec& d : net.devices) {
        if (d.kind == DeviceKind::QD) {
            d.droop.tau1 += 0.01;  // QD1 no longer matches
            break;
        }
    }
    CHECK_FALSE(validate_suite(builtin_suite("case39_22"), net).ok);
}

TEST_CASE("case3 carries its published machine constants") {
    const SuiteReport rep = validate_suite(builtin_suite("case3"), load_case3());
    CHECK(rep.ok);
    CHECK(rep.device_count == 3);
    CHECK(rep.state_dim == 7);
}
