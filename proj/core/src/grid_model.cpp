#include "pgrid/grid_model.hpp"

#include <algorithm>
#include <complex>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pgrid {

using nlohmann::json;

const char* to_string(BusRole role) {
    switch (role) {
        case BusRole::Slack: return "Slack";
        case BusRole::PV: return "PV";
        case BusRole::PQ: return "PQ";
    }
    return "?";
}

const char* to_string(DeviceKind kind) {
    switch (kind) {
        case DeviceKind::SG: return "SG";
        case DeviceKind::CD: return "CD";
        case DeviceKind::QD: return "QD";
    }
    return "?";
}

namespace {

BusRole role_from_string(const std::string& s) {
    if (s == "Slack") return BusRole::Slack;
    if (s == "PV") return BusRole::PV;
    if (s == "PQ") return BusRole::PQ;
    throw ParseError("unknown bus role '" + s + "'");
}

DeviceKind kind_from_string(const std::string& s) {
    if (s == "SG") return DeviceKind::SG;
    if (s == "CD") return DeviceKind::CD;
    if (s == "QD") return DeviceKind::QD;
    throw ParseError("unknown device kind '" + s + "'");
}

double require_number(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw ParseError(ctx + ": missing or non-numeric field '" + key + "'");
    return it->get<double>();
}

int require_int(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer())
        throw ParseError(ctx + ": missing or non-integer field '" + key + "'");
    return it->get<int>();
}

DeviceSpec parse_device(const json& jd) {
    DeviceSpec d;
    d.bus = require_int(jd, "bus", "device");
    auto kit = jd.find("kind");
    if (kit == jd.end() || !kit->is_string())
        throw ParseError("device: missing 'kind'");
    d.kind = kind_from_string(kit->get<std::string>());
    auto pit = jd.find("params");
    if (pit == jd.end() || !pit->is_object())
        throw ParseError("device: missing 'params' object");
    const json& p = *pit;
    const std::string ctx = "device at bus " + std::to_string(d.bus);
    if (d.kind == DeviceKind::SG) {
        d.sg.m = require_number(p, "m", ctx);
        d.sg.d = require_number(p, "d", ctx);
        d.sg.td_prime = require_number(p, "td_prime", ctx);
        d.sg.xd = require_number(p, "xd", ctx);
        d.sg.xd_prime = require_number(p, "xd_prime", ctx);
        if (p.contains("k_i") || p.contains("k_p") || p.contains("k_e")) {
            SgGains g;
            g.ki = require_number(p, "k_i", ctx);
            g.kp = require_number(p, "k_p", ctx);
            g.ke = require_number(p, "k_e", ctx);
            d.sg_gains = g;
        }
    } else {
        d.droop.tau1 = require_number(p, "tau1", ctx);
        d.droop.tau2 = require_number(p, "tau2", ctx);
        if (p.contains("d1") || p.contains("d2")) {
            DroopGains g;
            g.d1 = require_number(p, "d1", ctx);
            g.d2 = require_number(p, "d2", ctx);
            d.droop_gains = g;
        }
    }
    if (jd.contains("sigma") && !jd["sigma"].is_null()) {
        if (!jd["sigma"].is_number()) throw ParseError(ctx + ": 'sigma' must be a number or null");
        d.sigma = jd["sigma"].get<double>();
    }
    return d;
}

NetworkCase parse_json(const json& j) {
    if (!j.is_object()) throw ParseError("case file root must be an object");
    NetworkCase net;
    if (j.contains("base_mva")) net.base_mva = require_number(j, "base_mva", "case");
    if (j.contains("scale")) net.scale = require_number(j, "scale", "case");

    if (!j.contains("buses") || !j["buses"].is_array())
        throw ParseError("case file: missing 'buses' array");
    for (const auto& jb : j["buses"]) {
        Bus b;
        b.id = require_int(jb, "id", "bus");
        b.shunt_g = jb.value("shunt_g", 0.0);
        b.shunt_b = jb.value("shunt_b", 0.0);
        auto rit = jb.find("role");
        if (rit == jb.end() || !rit->is_string())
            throw ParseError("bus " + std::to_string(b.id) + ": missing 'role'");
        b.role = role_from_string(rit->get<std::string>());
        b.v_set = jb.value("v_set", 1.0);
        net.buses.push_back(b);
    }
    std::sort(net.buses.begin(), net.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });

    if (j.contains("lines")) {
        if (!j["lines"].is_array()) throw ParseError("'lines' must be an array");
        for (const auto& jl : j["lines"]) {
            Line l;
            l.from = require_int(jl, "from", "line");
            l.to = require_int(jl, "to", "line");
            l.r = require_number(jl, "r", "line");
            l.x = require_number(jl, "x", "line");
            net.lines.push_back(l);
        }
    }
    if (j.contains("loads")) {
        if (!j["loads"].is_array()) throw ParseError("'loads' must be an array");
        for (const auto& jl : j["loads"]) {
            LoadSpec s;
            s.bus = require_int(jl, "bus", "load");
            s.p = require_number(jl, "p", "load");
            s.q = require_number(jl, "q", "load");
            net.loads.push_back(s);
        }
    }
    if (j.contains("devices")) {
        if (!j["devices"].is_array()) throw ParseError("'devices' must be an array");
        for (const auto& jd : j["devices"]) net.devices.push_back(parse_device(jd));
    }
    return net;
}

/// Merge exact parallel branches into one equivalent series impedance.
void merge_parallel_lines(NetworkCase& net) {
    std::map<std::pair<int, int>, std::complex<double>> ysum;
    std::vector<std::pair<int, int>> order;
    for (const Line& l : net.lines) {
        if (l.from == l.to)
            throw ValidationError("line with from == to == " + std::to_string(l.from));
        if (l.x <= 0.0)
            throw ValidationError("line " + std::to_string(l.from) + "-" +
                                  std::to_string(l.to) + " has non-positive reactance");
        if (l.r < 0.0)
            throw ValidationError("line " + std::to_string(l.from) + "-" +
                                  std::to_string(l.to) + " has negative resistance");
        auto key = std::minmax(l.from, l.to);
        if (!ysum.count(key)) order.push_back(key);
        ysum[key] += 1.0 / std::complex<double>(l.r, l.x);
    }
    std::vector<Line> merged;
    for (const auto& key : order) {
        std::complex<double> z = 1.0 / ysum[key];
        merged.push_back(Line{key.first, key.second, z.real(), z.imag()});
    }
    net.lines = std::move(merged);
}

} // namespace

NetworkCase parse_case(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    NetworkCase net = parse_json(j);
    merge_parallel_lines(net);
    validate(net);
    return net;
}

NetworkCase load_case(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open case file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_case(ss.str());
}

void validate(const NetworkCase& net) {
    const int n = net.size();
    if (n == 0) throw ValidationError("case has no buses");
    for (int i = 0; i < n; ++i)
        if (net.buses[i].id != i)
            throw ValidationError("bus ids must be contiguous 0..n-1");

    int slack_count = 0;
    for (const Bus& b : net.buses) {
        if (b.role == BusRole::Slack) ++slack_count;
        if (b.v_set <= 0.0)
            throw ValidationError("bus " + std::to_string(b.id) + ": v_set must be positive");
    }
    if (slack_count != 1)
        throw ValidationError("expected exactly one Slack bus, found " +
                              std::to_string(slack_count));

    std::set<std::pair<int, int>> seen;
    std::vector<std::vector<int>> adj(n);
    for (const Line& l : net.lines) {
        if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n)
            throw ValidationError("line endpoint out of range");
        if (l.from == l.to)
            throw ValidationError("line with from == to == " + std::to_string(l.from));
        if (l.x <= 0.0)
            throw ValidationError("line " + std::to_string(l.from) + "-" +
                                  std::to_string(l.to) + " has non-positive reactance");
        if (l.r < 0.0)
            throw ValidationError("line " + std::to_string(l.from) + "-" +
                                  std::to_string(l.to) + " has negative resistance");
        auto key = std::minmax(l.from, l.to);
        if (!seen.insert(key).second)
            throw ValidationError("duplicate line " + std::to_string(key.first) + "-" +
                                  std::to_string(key.second));
        adj[l.from].push_back(l.to);
        adj[l.to].push_back(l.from);
    }

    // connectivity (a single bus is trivially connected)
    std::vector<char> vis(n, 0);
    std::vector<int> stack{0};
    vis[0] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!vis[v]) {
                vis[v] = 1;
                stack.push_back(v);
            }
    }
    if (std::count(vis.begin(), vis.end(), 1) != n)
        throw ValidationError("network graph is disconnected");

    if (net.scale <= 0.0) throw ValidationError("scale must be positive");
    if (net.base_mva <= 0.0) throw ValidationError("base_mva must be positive");

    for (const LoadSpec& l : net.loads)
        if (l.bus < 0 || l.bus >= n)
            throw ValidationError("load references nonexistent bus " + std::to_string(l.bus));

    std::set<int> dev_buses;
    for (const DeviceSpec& d : net.devices) {
        if (d.bus < 0 || d.bus >= n)
            throw ValidationError("device references nonexistent bus " + std::to_string(d.bus));
        if (!dev_buses.insert(d.bus).second)
            throw ValidationError("multiple devices at bus " + std::to_string(d.bus));
        if (d.kind == DeviceKind::SG) {
            if (d.sg.m <= 0.0 || d.sg.td_prime <= 0.0)
                throw ValidationError("SG at bus " + std::to_string(d.bus) +
                                      ": m and td_prime must be positive");
            if (!(d.sg.xd > d.sg.xd_prime && d.sg.xd_prime > 0.0))
                throw ValidationError("SG at bus " + std::to_string(d.bus) +
                                      ": requires xd > xd_prime > 0");
        } else {
            if (d.droop.tau1 <= 0.0 || d.droop.tau2 <= 0.0)
                throw ValidationError("droop at bus " + std::to_string(d.bus) +
                                      ": time constants must be positive");
            if (d.droop_gains && !(d.droop_gains->d1 > 0.0 && d.droop_gains->d2 > 0.0))
                throw ValidationError("droop at bus " + std::to_string(d.bus) +
                                      ": explicit gains must be positive");
        }
    }
}

Admittance build_admittance(const NetworkCase& net) {
    const int n = net.size();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (const Line& l : net.lines) {
        std::complex<double> yl = 1.0 / std::complex<double>(l.r, l.x);
        y(l.from, l.from) += yl;
        y(l.to, l.to) += yl;
        y(l.from, l.to) -= yl;
        y(l.to, l.from) -= yl;
    }
    for (const Bus& b : net.buses)
        y(b.id, b.id) += std::complex<double>(b.shunt_g, b.shunt_b);
    return Admittance{y.real(), y.imag()};
}

bool is_lossless(const NetworkCase& net) {
    for (const Line& l : net.lines)
        if (l.r != 0.0) return false;
    for (const Bus& b : net.buses)
        if (b.shunt_g != 0.0) return false;
    return true;
}

} // namespace pgrid
