#pragma once

// Attack-graph construction: node templates with bound attacks, the linear
// chain generator (start -> (Linux -> Windows)^n -> Linux[Flag] plus trap
// branches) and the fixed 12-node CTF preset.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "redtrace/core.hpp"
#include "redtrace/env/actions.hpp"

namespace redtrace::env {

enum class Os { Linux, Windows, Other };

inline std::string to_string(Os os) {
    switch (os) {
        case Os::Linux: return "linux";
        case Os::Windows: return "windows";
        case Os::Other: return "other";
    }
    return "?";
}

inline Os os_from_string(const std::string& s) {
    if (s == "linux") return Os::Linux;
    if (s == "windows") return Os::Windows;
    if (s == "other") return Os::Other;
    throw InvalidArgument("unknown os: " + s);
}

// One effect of executing an attack. An attack may carry several.
struct VulnOutcome {
    enum class Kind { LeakCredential, RevealNode, RevealProperty, Nothing };
    Kind kind = Kind::Nothing;
    std::string cred_id;   // LeakCredential
    std::string target;    // LeakCredential / RevealNode
    std::string service;   // LeakCredential
    std::string property;  // RevealProperty

    static VulnOutcome leak(std::string cred_id, std::string target, std::string service) {
        VulnOutcome o;
        o.kind = Kind::LeakCredential;
        o.cred_id = std::move(cred_id);
        o.target = std::move(target);
        o.service = std::move(service);
        return o;
    }
    static VulnOutcome reveal_node(std::string target) {
        VulnOutcome o;
        o.kind = Kind::RevealNode;
        o.target = std::move(target);
        return o;
    }
    static VulnOutcome reveal_property(std::string property) {
        VulnOutcome o;
        o.kind = Kind::RevealProperty;
        o.property = std::move(property);
        return o;
    }
    static VulnOutcome nothing() { return VulnOutcome{}; }
};

// A concrete attack bound to a node: a display name (what observations and
// state tables show) instantiating one ladder entry.
struct Vulnerability {
    int action_index = 0;  // 1-based ladder index
    std::string name;
    std::vector<VulnOutcome> outcomes;
};

struct CredentialSpec {
    std::string id;
    std::string target;
    std::string service;

    bool operator==(const CredentialSpec&) const = default;
};

struct NodeTemplate {
    std::string id;
    Os os = Os::Other;
    double value = 0.0;  // reward on first compromise
    bool is_trap = false;
    bool flag = false;  // terminal goal: compromising it ends the episode
    std::vector<std::string> properties;
    std::vector<Vulnerability> local_vulns;   // executable from the node once owned
    std::vector<Vulnerability> remote_vulns;  // executable against the node once visible

    bool exploitable() const { return !local_vulns.empty() || !remote_vulns.empty(); }

    // Credentials this node surrenders through its local attacks.
    std::vector<CredentialSpec> leaks() const {
        std::vector<CredentialSpec> out;
        for (const auto& v : local_vulns)
            for (const auto& o : v.outcomes)
                if (o.kind == VulnOutcome::Kind::LeakCredential)
                    out.push_back({o.cred_id, o.target, o.service});
        return out;
    }
};

struct NetworkTopology {
    std::string name;
    std::string ladder_id;  // "chain15" or "ctf18"
    std::string entry;
    std::vector<NodeTemplate> nodes;  // canonical order; drives encoding slots
    std::vector<std::pair<std::string, std::string>> edges;

    const ActionLadder& ladder() const { return ladder_by_id(ladder_id); }

    std::size_t max_nodes() const { return nodes.size(); }

    std::size_t size() const {
        return static_cast<std::size_t>(
            std::count_if(nodes.begin(), nodes.end(), [](const NodeTemplate& n) { return n.exploitable(); }));
    }

    int node_index(const std::string& id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return static_cast<int>(i);
        return -1;
    }

    const NodeTemplate& node(const std::string& id) const {
        int i = node_index(id);
        if (i < 0) throw InvalidArgument("unknown node: " + id);
        return nodes[static_cast<std::size_t>(i)];
    }

    // All credentials that can leak anywhere in the topology, in canonical
    // (node, vuln, outcome) order. Stable; drives the credential bits of the
    // state encoding.
    std::vector<CredentialSpec> credentials() const {
        std::vector<CredentialSpec> out;
        for (const auto& n : nodes) {
            for (const auto* vulns : {&n.local_vulns, &n.remote_vulns})
                for (const auto& v : *vulns)
                    for (const auto& o : v.outcomes)
                        if (o.kind == VulnOutcome::Kind::LeakCredential)
                            out.push_back({o.cred_id, o.target, o.service});
        }
        return out;
    }
};

inline void validate(const NetworkTopology& topo) {
    if (topo.node_index(topo.entry) < 0) throw InvalidArgument("entry node missing from topology");
    std::map<std::string, int> seen;
    for (const auto& n : topo.nodes) {
        if (++seen[n.id] > 1) throw InvalidArgument("duplicate node id: " + n.id);
        if (n.is_trap && n.value > 0) throw InvalidArgument("trap node with positive value: " + n.id);
        if (!n.is_trap && n.value < 0) throw InvalidArgument("non-trap node with negative value: " + n.id);
        const auto& ladder = topo.ladder();
        for (const auto* vulns : {&n.local_vulns, &n.remote_vulns}) {
            std::vector<int> used;
            for (const auto& v : *vulns) {
                if (v.action_index < 1 || v.action_index > static_cast<int>(ladder.size()))
                    throw InvalidArgument("vulnerability index out of ladder range on " + n.id);
                if (std::find(used.begin(), used.end(), v.action_index) != used.end())
                    throw InvalidArgument("duplicate ladder index on node " + n.id);
                used.push_back(v.action_index);
                for (const auto& o : v.outcomes) {
                    if ((o.kind == VulnOutcome::Kind::LeakCredential ||
                         o.kind == VulnOutcome::Kind::RevealNode) &&
                        topo.node_index(o.target) < 0)
                        throw InvalidArgument("outcome targets unknown node: " + o.target);
                }
            }
        }
    }
    for (const auto& [a, b] : topo.edges)
        if (topo.node_index(a) < 0 || topo.node_index(b) < 0)
            throw InvalidArgument("edge endpoint missing: " + a + " -> " + b);
}

// ----- chain builder ---------------------------------------------------

struct ChainParams {
    int n_pairs = 1;
    std::uint64_t seed = 0;
    int n_traps = -1;  // default: one per pair
    double node_value = 10.0;
    double flag_value = 100.0;
    double trap_value = -10.0;
};

inline NetworkTopology build_chain(const ChainParams& params) {
    if (params.n_pairs < 1) throw InvalidArgument("build_chain: n_pairs must be >= 1");
    const int n = params.n_pairs;
    const int n_traps = params.n_traps < 0 ? n : params.n_traps;

    NetworkTopology topo;
    topo.name = "chain-" + std::to_string(n);
    topo.ladder_id = "chain15";
    topo.entry = "start";

    auto probe_vulns = [](Os os) {
        std::vector<Vulnerability> v;
        v.push_back({2, "ProbeLinux",
                     {os == Os::Linux ? VulnOutcome::reveal_property("Linux") : VulnOutcome::nothing()}});
        v.push_back({4, "ProbeWindows",
                     {os == Os::Windows ? VulnOutcome::reveal_property("Windows") : VulnOutcome::nothing()}});
        return v;
    };

    auto linux_name = [n](int i) {
        return i <= n ? "linux_" + std::to_string(i) : std::string("linux_flag");
    };

    // Trap branches hang off the Linux rungs; the seed shuffles which rung
    // hosts which trap.
    std::vector<int> rung_order(static_cast<std::size_t>(n));
    std::iota(rung_order.begin(), rung_order.end(), 1);
    Rng rng(derive_seed(params.seed, "chain-traps"));
    for (std::size_t i = rung_order.size(); i > 1; --i)
        std::swap(rung_order[i - 1], rung_order[rng.below(i)]);
    std::vector<std::vector<int>> traps_on_rung(static_cast<std::size_t>(n + 1));
    for (int t = 0; t < n_traps; ++t)
        traps_on_rung[static_cast<std::size_t>(rung_order[static_cast<std::size_t>(t) % rung_order.size()])]
            .push_back(t + 1);

    {
        NodeTemplate start;
        start.id = "start";
        start.os = Os::Linux;
        start.value = 0.0;
        start.local_vulns.push_back(
            {3, "ScanBashHistory", {VulnOutcome::leak("ssh-linux_1", "linux_1", "SSH")}});
        start.remote_vulns = probe_vulns(Os::Linux);
        topo.nodes.push_back(std::move(start));
    }

    for (int i = 1; i <= n; ++i) {
        NodeTemplate lin;
        lin.id = linux_name(i);
        lin.os = Os::Linux;
        lin.value = params.node_value;
        lin.properties = {"Linux", "SSH"};
        const std::string win = "windows_" + std::to_string(i);
        lin.local_vulns.push_back(
            {1, "CrackKeePassX", {VulnOutcome::leak("rdp-" + win, win, "RDP")}});
        lin.local_vulns.push_back({3, "ScanBashHistory", {VulnOutcome::reveal_node(win)}});
        {
            // The decoy: on Linux this scan only surfaces trap machines.
            Vulnerability decoy{13, "ScanExplorerRecentFiles", {}};
            for (int t : traps_on_rung[static_cast<std::size_t>(i)]) {
                const std::string trap = "trap_" + std::to_string(t);
                decoy.outcomes.push_back(VulnOutcome::leak("rdp-" + trap, trap, "RDP"));
            }
            if (decoy.outcomes.empty()) decoy.outcomes.push_back(VulnOutcome::nothing());
            lin.local_vulns.push_back(std::move(decoy));
        }
        lin.local_vulns.push_back({14, "SudoAttempt", {VulnOutcome::nothing()}});
        lin.remote_vulns = probe_vulns(Os::Linux);
        topo.nodes.push_back(std::move(lin));

        NodeTemplate winnode;
        winnode.id = win;
        winnode.os = Os::Windows;
        winnode.value = params.node_value;
        winnode.properties = {"Windows", "RDP"};
        const std::string next = linux_name(i + 1);
        winnode.local_vulns.push_back(
            {5, "CrackKeePass", {VulnOutcome::leak("ssh-" + next, next, "SSH")}});
        winnode.local_vulns.push_back(
            {13, "ScanExplorerRecentFiles", {VulnOutcome::reveal_node(next)}});
        winnode.remote_vulns = probe_vulns(Os::Windows);
        topo.nodes.push_back(std::move(winnode));
    }

    {
        NodeTemplate flag;
        flag.id = "linux_flag";
        flag.os = Os::Linux;
        flag.value = params.flag_value;
        flag.flag = true;
        flag.properties = {"Linux", "Flag"};
        flag.remote_vulns = probe_vulns(Os::Linux);
        topo.nodes.push_back(std::move(flag));
    }

    for (int t = 1; t <= n_traps; ++t) {
        NodeTemplate trap;
        trap.id = "trap_" + std::to_string(t);
        trap.os = Os::Windows;
        trap.value = params.trap_value;
        trap.is_trap = true;
        trap.properties = {"Windows"};
        topo.nodes.push_back(std::move(trap));
    }

    topo.edges.emplace_back("start", "linux_1");
    for (int i = 1; i <= n; ++i) {
        topo.edges.emplace_back(linux_name(i), "windows_" + std::to_string(i));
        topo.edges.emplace_back("windows_" + std::to_string(i), linux_name(i + 1));
        for (int t : traps_on_rung[static_cast<std::size_t>(i)])
            topo.edges.emplace_back(linux_name(i), "trap_" + std::to_string(t));
    }

    validate(topo);
    return topo;
}

inline NetworkTopology build_chain(int n_pairs, std::uint64_t seed) {
    ChainParams p;
    p.n_pairs = n_pairs;
    p.seed = seed;
    return build_chain(p);
}

// ----- CTF preset ------------------------------------------------------

// Fixed hub-and-spoke enterprise scenario. Node names, per-node attack
// names and the discovery order match the published state tables; the
// credential wiring between them is reconstructed.
inline NetworkTopology build_ctf() {
    NetworkTopology topo;
    topo.name = "ctf";
    topo.ladder_id = "ctf18";
    topo.entry = "client";

    auto add = [&topo](NodeTemplate n) { topo.nodes.push_back(std::move(n)); };

    {
        NodeTemplate n;
        n.id = "client";
        n.os = Os::Windows;
        n.value = 0.0;
        n.local_vulns.push_back(
            {1, "SearchEdgeHistory", {VulnOutcome::leak("web-anon", "Website", "HTTPS")}});
        add(std::move(n));
    }
    {
        NodeTemplate n;
        n.id = "Website";
        n.os = Os::Linux;
        n.value = 10.0;
        n.properties = {"MySql", "Ubuntu", "nginx/1.10.3"};
        n.local_vulns.push_back(
            {1, "CredScanBashHistory",
             {VulnOutcome::leak("monitor-bash", "Website[user=monitor]", "SSH")}});
        n.local_vulns.push_back({3, "SudoAttempt", {VulnOutcome::nothing()}});
        n.remote_vulns.push_back(
            {6, "ScanPageSource", {VulnOutcome::reveal_node("Website.Directory")}});
        n.remote_vulns.push_back(
            {8, "ScanPageContent", {VulnOutcome::reveal_node("GitHubProject")}});
        add(std::move(n));
    }
    {
        NodeTemplate n;
        n.id = "Website[user=monitor]";
        n.os = Os::Linux;
        n.value = 10.0;
        n.properties = {"MySql", "Ubuntu", "nginx/1.10.3"};
        n.local_vulns.push_back(
            {5, "CredScan-HomeDirectory",
             {VulnOutcome::leak("azure-sas", "AzureStorage", "HTTPS"),
              VulnOutcome::leak("azure-ad", "AzureResourceManager", "HTTPS")}});
        add(std::move(n));
    }
    {
        NodeTemplate n;
        n.id = "Website.Directory";
        n.os = Os::Linux;
        n.value = 10.0;
        n.properties = {"nginx/1.10.3"};
        n.remote_vulns.push_back(
            {6, "NavigateWebDirectory", {VulnOutcome::reveal_node("Sharepoint")}});
        n.remote_vulns.push_back(
            {17, "NavigateWebDirectoryFurther",
             {VulnOutcome::leak("sharepoint-user", "Sharepoint", "HTTPS")}});
        add(std::move(n));
    }
    {
        NodeTemplate n;
        n.id = "GitHubProject";
        n.os = Os::Other;
        n.value = 10.0;
        n.properties = {"GitHub"};
        n.remote_vulns.push_back(
            {6, "CredScanGitHistory", {VulnOutcome::leak("git-sas", "AzureStorage", "HTTPS")}});
        add(std::move(n));
    }
    {
        NodeTemplate n;
        n.id = "AzureStorage";
        n.os = Os::Other;
        n.value = 10.0;
        n.properties = {"CTFFLAG:LeakedCustomerData"};
        n.remote_vulns.push_back(
            {7, "AccessDataWithSASToken", {VulnOutcome::reveal_property("SASTokenData")}});
        add(std::move(n));
    }
    {
        NodeTemplate n;
        n.id = "Sharepoint";
        n.os = Os::Windows;
        n.value = 10.0;
        n.properties = {"SharePoint"};
        n.remote_vulns.push_back(
            {8, "ScanSharepointParentDirectory",
             {VulnOutcome::leak("ad-user", "AzureResourceManager", "HTTPS")}});
        add(std::move(n));
    }
    {
        NodeTemplate n;
        n.id = "AzureResourceManager";
        n.os = Os::Other;
        n.value = 10.0;
        n.properties = {"CTFFLAG:LeakedCustomerData2"};
        n.remote_vulns.push_back(
            {17, "ListAzureResources",
             {VulnOutcome::leak("vm-ssh", "AzureVM", "SSH")}});
        add(std::move(n));
    }
    {
        NodeTemplate n;
        n.id = "AzureVM";
        n.os = Os::Linux;
        n.value = 100.0;
        n.properties = {"Ubuntu"};
        n.local_vulns.push_back(
            {4, "ExfiltrateFlag", {VulnOutcome::reveal_property("CTFFLAG:VMPrivateData")}});
        add(std::move(n));
    }
    // Non-exploitable infrastructure filling out the enterprise footprint.
    for (const char* id : {"Firewall", "MonitoringAgent", "BackupServer"}) {
        NodeTemplate n;
        n.id = id;
        n.os = Os::Other;
        add(std::move(n));
    }

    topo.edges = {
        {"client", "Website"},
        {"Website", "Website[user=monitor]"},
        {"Website", "Website.Directory"},
        {"Website", "GitHubProject"},
        {"Website.Directory", "Sharepoint"},
        {"Website[user=monitor]", "AzureStorage"},
        {"Website[user=monitor]", "AzureResourceManager"},
        {"GitHubProject", "AzureStorage"},
        {"Sharepoint", "AzureResourceManager"},
        {"AzureResourceManager", "AzureVM"},
        {"Firewall", "Website"},
        {"MonitoringAgent", "Website[user=monitor]"},
        {"BackupServer", "AzureStorage"},
    };

    validate(topo);
    return topo;
}

// ----- presets ---------------------------------------------------------

// Named environments. The chain presets are sized so that (exploitable,
// total) node counts land on the published configuration table; CC6/CC10
// are desk-scale additions.
inline NetworkTopology build_preset(const std::string& name, std::uint64_t seed) {
    auto chain = [seed](const std::string& preset, int pairs, int traps) {
        ChainParams p;
        p.n_pairs = pairs;
        p.seed = seed;
        p.n_traps = traps;
        auto topo = build_chain(p);
        topo.name = preset;
        return topo;
    };
    if (name == "ctf") return build_ctf();
    if (name == "cc6") return chain("cc6", 2, 2);
    if (name == "cc10") return chain("cc10", 4, 4);
    if (name == "cc22") return chain("cc22", 5, 10);
    if (name == "cc100") return chain("cc100", 34, 30);
    if (name == "cc500") return chain("cc500", 174, 150);
    throw InvalidArgument("unknown preset: " + name);
}

}  // namespace redtrace::env
