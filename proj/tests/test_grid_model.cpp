#include <doctest.h>

#include <complex>
#include <random>

#include "pgrid/grid_model.hpp"
#include "test_util.hpp"

using namespace pgrid;
using namespace pgrid::testutil;

TEST_CASE("shipped 3-bus case loads with its device table") {
    const NetworkCase net = load_case3();
    CHECK(net.size() == 3);
    CHECK(net.lines.size() == 3);
    CHECK(net.devices.size() == 3);
    const DeviceSpec& sg = net.devices[0];
    CHECK(sg.kind == DeviceKind::SG);
    CHECK(sg.sg.m == doctest::Approx(0.16));
    CHECK(sg.sg.d == doctest::Approx(0.076));
    CHECK(sg.sg.td_prime == doctest::Approx(6.56));
    CHECK(sg.sg.xd == doctest::Approx(0.295));
    CHECK(sg.sg.xd_prime == doctest::Approx(0.17));
    CHECK(net.devices[1].droop.tau2 == doctest::Approx(10.0));
    CHECK(net.devices[2].droop.tau1 == doctest::Approx(0.7));
    CHECK(net.buses[0].role == BusRole::Slack);
}

TEST_CASE("single-bus case is trivially connected") {
    const char* text = R"({"buses":[{"id":0,"role":"Slack"}],"lines":[],"loads":[]})";
    const NetworkCase net = parse_case(text);
    CHECK(net.size() == 1);
}

TEST_CASE("self-loop line rejected") {
    const char* text =
        R"({"buses":[{"id":0,"role":"Slack"},{"id":1,"role":"PQ"}],
            "lines":[{"from":1,"to":1,"r":0,"x":0.1}]})";
    CHECK_THROWS_AS(parse_case(text), ValidationError);
}

TEST_CASE("disconnected graph rejected") {
    const char* text =
        R"({"buses":[{"id":0,"role":"Slack"},{"id":1,"role":"PQ"},
                     {"id":2,"role":"PQ"},{"id":3,"role":"PQ"}],
            "lines":[{"from":0,"to":1,"r":0,"x":0.1},{"from":2,"to":3,"r":0,"x":0.1}]})";
    CHECK_THROWS_AS(parse_case(text), ValidationError);
}

TEST_CASE("slack count enforced") {
    CHECK_THROWS_AS(parse_case(R"({"buses":[{"id":0,"role":"PQ"}],"lines":[]})"),
                    ValidationError);
    CHECK_THROWS_AS(
        parse_case(R"({"buses":[{"id":0,"role":"Slack"},{"id":1,"role":"Slack"}],
                       "lines":[{"from":0,"to":1,"r":0,"x":1}]})"),
        ValidationError);
}

TEST_CASE("malformed json is a ParseError") {
    CHECK_THROWS_AS(parse_case("{nope"), ParseError);
    CHECK_THROWS_AS(parse_case(R"({"buses":[{"id":0}]})"), ParseError);  // missing role
    CHECK_THROWS_AS(load_case(cases_dir() + "/no_such_file.json"), ParseError);
}

TEST_CASE("parallel lines merge at ingestion") {
    const char* text =
        R"({"buses":[{"id":0,"role":"Slack"},{"id":1,"role":"PQ"}],
            "lines":[{"from":0,"to":1,"r":0,"x":0.2},{"from":1,"to":0,"r":0,"x":0.2}]})";
    const NetworkCase net = parse_case(text);
    REQUIRE(net.lines.size() == 1);
    CHECK(net.lines[0].x == doctest::Approx(0.1));

    // but a directly-constructed duplicate fails validation
    NetworkCase dup = net;
    dup.lines.push_back(Line{0, 1, 0.0, 0.3});
    CHECK_THROWS_AS(validate(dup), ValidationError);
}

TEST_CASE("two-bus pure reactance admittance") {
    NetworkCase net;
    net.buses = {Bus{0, 0, 0, BusRole::Slack, 1.0}, Bus{1, 0, 0, BusRole::PQ, 1.0}};
    net.lines = {Line{0, 1, 0.0, 0.1}};
    const Admittance adm = build_admittance(net);
    CHECK(adm.g.norm() == doctest::Approx(0.0));
    CHECK(adm.b(0, 0) == doctest::Approx(-10.0));
    CHECK(adm.b(0, 1) == doctest::Approx(10.0));
    CHECK(adm.b(1, 0) == doctest::Approx(10.0));
    CHECK(adm.b(1, 1) == doctest::Approx(-10.0));
}

TEST_CASE("lossy admittance matches the complex reciprocal") {
    NetworkCase net;
    net.buses = {Bus{0, 0, 0, BusRole::Slack, 1.0}, Bus{1, 0, 0, BusRole::PQ, 1.0}};
    net.lines = {Line{0, 1, 0.01, 0.1}};
    const Admittance adm = build_admittance(net);
    const std::complex<double> y = 1.0 / std::complex<double>(0.01, 0.1);
    CHECK(adm.g(0, 1) == doctest::Approx(-y.real()).epsilon(1e-14));
    CHECK(adm.b(0, 1) == doctest::Approx(-y.imag()).epsilon(1e-14));
    CHECK(adm.g(0, 0) == doctest::Approx(y.real()).epsilon(1e-14));
}

TEST_CASE("losslessness flag") {
    NetworkCase net;
    net.buses = {Bus{0, 0, 0, BusRole::Slack, 1.0}, Bus{1, 0, 0, BusRole::PQ, 1.0}};
    net.lines = {Line{0, 1, 0.0, 0.1}};
    CHECK(is_lossless(net));
    net.lines[0].r = 0.01;
    CHECK_FALSE(is_lossless(net));
    net.lines[0].r = 0.0;
    net.buses[1].shunt_g = 0.5;
    CHECK_FALSE(is_lossless(net));
}

TEST_CASE("admittance symmetry and shunt-free row sums over random networks") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> xr(0.05, 0.5);
    std::uniform_int_distribution<int> extra(0, 6);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 8);
        NetworkCase net;
        for (int i = 0; i < n; ++i)
            net.buses.push_back(Bus{i, 0, 0, i == 0 ? BusRole::Slack : BusRole::PQ, 1.0});
        for (int i = 1; i < n; ++i)  // random spanning tree plus extras
            net.lines.push_back(Line{static_cast<int>(rng() % i), i, 0.01, xr(rng)});
        for (int k = extra(rng); k > 0; --k) {
            int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
            if (a == b) continue;
            bool dup = false;
            for (const Line& l : net.lines)
                dup |= (std::min(l.from, l.to) == std::min(a, b) &&
                        std::max(l.from, l.to) == std::max(a, b));
            if (!dup) net.lines.push_back(Line{a, b, 0.01, xr(rng)});
        }
        const Admittance adm = build_admittance(net);
        CHECK((adm.g - adm.g.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK((adm.b - adm.b.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK(adm.b.rowwise().sum().lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK(adm.g.rowwise().sum().lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("admittance build is deterministic") {
    const NetworkCase net = load_case3();
    const Admittance a = build_admittance(net);
    const Admittance b = build_admittance(net);
    CHECK((a.g - b.g).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((a.b - b.b).lpNorm<Eigen::Infinity>() == 0.0);
}
