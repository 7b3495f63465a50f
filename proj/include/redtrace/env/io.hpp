#pragma once

// Canonical topology file format: JSON with fixed key order so generated
// environments diff cleanly and hash stably. Schema documented in README.

#include <fstream>
#include <string>

#include <json.hpp>

#include "redtrace/core.hpp"
#include "redtrace/env/topology.hpp"

namespace redtrace::env {

using ojson = nlohmann::ordered_json;

inline ojson outcome_to_json(const VulnOutcome& o) {
    ojson j;
    switch (o.kind) {
        case VulnOutcome::Kind::LeakCredential:
            j["kind"] = "leak";
            j["cred"] = o.cred_id;
            j["target"] = o.target;
            j["service"] = o.service;
            break;
        case VulnOutcome::Kind::RevealNode:
            j["kind"] = "reveal_node";
            j["target"] = o.target;
            break;
        case VulnOutcome::Kind::RevealProperty:
            j["kind"] = "reveal_property";
            j["property"] = o.property;
            break;
        case VulnOutcome::Kind::Nothing:
            j["kind"] = "nothing";
            break;
    }
    return j;
}

inline VulnOutcome outcome_from_json(const ojson& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "leak")
        return VulnOutcome::leak(j.at("cred").get<std::string>(), j.at("target").get<std::string>(),
                                 j.at("service").get<std::string>());
    if (kind == "reveal_node") return VulnOutcome::reveal_node(j.at("target").get<std::string>());
    if (kind == "reveal_property")
        return VulnOutcome::reveal_property(j.at("property").get<std::string>());
    if (kind == "nothing") return VulnOutcome::nothing();
    throw InvalidArgument("unknown outcome kind in topology file: " + kind);
}

inline ojson topology_to_json(const NetworkTopology& topo) {
    ojson j;
    j["format"] = "redtrace-topology";
    j["version"] = 1;
    j["name"] = topo.name;
    j["ladder"] = topo.ladder_id;
    j["entry"] = topo.entry;
    j["size"] = topo.size();
    j["max_nodes"] = topo.max_nodes();
    j["nodes"] = ojson::array();
    for (const auto& n : topo.nodes) {
        ojson nj;
        nj["id"] = n.id;
        nj["os"] = to_string(n.os);
        nj["value"] = n.value;
        nj["trap"] = n.is_trap;
        nj["flag"] = n.flag;
        nj["properties"] = n.properties;
        auto vulns_to_json = [](const std::vector<Vulnerability>& vulns) {
            ojson arr = ojson::array();
            for (const auto& v : vulns) {
                ojson vj;
                vj["action"] = v.action_index;
                vj["name"] = v.name;
                vj["outcomes"] = ojson::array();
                for (const auto& o : v.outcomes) vj["outcomes"].push_back(outcome_to_json(o));
                arr.push_back(std::move(vj));
            }
            return arr;
        };
        nj["local"] = vulns_to_json(n.local_vulns);
        nj["remote"] = vulns_to_json(n.remote_vulns);
        j["nodes"].push_back(std::move(nj));
    }
    j["edges"] = ojson::array();
    for (const auto& [a, b] : topo.edges) j["edges"].push_back(ojson::array({a, b}));
    return j;
}

inline NetworkTopology topology_from_json(const ojson& j) {
    if (j.value("format", "") != "redtrace-topology")
        throw InvalidArgument("not a topology file (missing format marker)");
    NetworkTopology topo;
    topo.name = j.at("name").get<std::string>();
    topo.ladder_id = j.at("ladder").get<std::string>();
    topo.entry = j.at("entry").get<std::string>();
    for (const auto& nj : j.at("nodes")) {
        NodeTemplate n;
        n.id = nj.at("id").get<std::string>();
        n.os = os_from_string(nj.at("os").get<std::string>());
        n.value = nj.at("value").get<double>();
        n.is_trap = nj.at("trap").get<bool>();
        n.flag = nj.at("flag").get<bool>();
        n.properties = nj.at("properties").get<std::vector<std::string>>();
        auto vulns_from_json = [](const ojson& arr) {
            std::vector<Vulnerability> vulns;
            for (const auto& vj : arr) {
                Vulnerability v;
                v.action_index = vj.at("action").get<int>();
                v.name = vj.at("name").get<std::string>();
                for (const auto& oj : vj.at("outcomes")) v.outcomes.push_back(outcome_from_json(oj));
                vulns.push_back(std::move(v));
            }
            return vulns;
        };
        n.local_vulns = vulns_from_json(nj.at("local"));
        n.remote_vulns = vulns_from_json(nj.at("remote"));
        topo.nodes.push_back(std::move(n));
    }
    for (const auto& ej : j.at("edges"))
        topo.edges.emplace_back(ej.at(0).get<std::string>(), ej.at(1).get<std::string>());
    validate(topo);
    return topo;
}

inline void save_topology(const NetworkTopology& topo, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write topology file: " + path);
    out << topology_to_json(topo).dump(2) << "\n";
}

inline NetworkTopology load_topology(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read topology file: " + path);
    ojson j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoError("malformed topology file " + path + ": " + e.what());
    }
    return topology_from_json(j);
}

}  // namespace redtrace::env
