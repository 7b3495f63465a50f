#pragma once

// POMDP step semantics over a NetworkTopology. The simulator is fully
// deterministic: dynamics depend only on (ownership, discovery, credential)
// state, so identical action sequences replay to identical rewards.
//
// Reward model: first compromise pays the node value (negative for traps),
// repeated connects pay 0, actions that surface a new node or credential pay
// 0, and anything else is a probe that costs `probe_penalty`. Property
// reveals are informational only; they never change rewards or transitions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "redtrace/core.hpp"
#include "redtrace/env/actions.hpp"
#include "redtrace/env/topology.hpp"

namespace redtrace::env {

struct EnvConfig {
    int step_cap = 200;
    double probe_penalty = -1.0;
};

// Node visibility: 0 = undiscovered, 1 = discovered, 2 = owned.
enum : std::uint8_t { kUndiscovered = 0, kDiscovered = 1, kOwned = 2 };

struct EnvState {
    std::vector<std::uint8_t> status;              // per node, canonical order
    std::vector<std::uint8_t> creds;               // per topology credential
    std::vector<std::vector<std::string>> probed;  // properties revealed pre-ownership
    int t = 0;
    double cumulative_reward = 0.0;
    bool done = false;
    bool terminal = false;  // flag captured (as opposed to step-cap truncation)
    std::uint64_t seed = 0;

    int owned_count() const {
        int c = 0;
        for (auto s : status) c += (s == kOwned);
        return c;
    }
    int discovered_count() const {  // includes owned
        int c = 0;
        for (auto s : status) c += (s != kUndiscovered);
        return c;
    }
};

struct ObservationRow {
    std::string id;
    std::uint8_t status = kDiscovered;
    std::vector<std::string> properties;                    // visible only
    std::vector<std::pair<int, std::string>> local_attacks;  // (ladder index, name)
    std::vector<std::pair<int, std::string>> remote_attacks;
};

struct KnownCredential {
    int cred_index = 0;  // position in topology credential list
    CredentialSpec cred;
};

// The agent-visible projection. Self-contained: legal-action enumeration
// needs nothing beyond this.
struct Observation {
    std::string ladder_id;
    std::vector<ObservationRow> rows;  // exactly discovered ∪ owned, canonical order
    std::vector<KnownCredential> credentials;
    int t = 0;
    int step_cap = 0;
    int max_nodes = 0;
    int owned_count = 0;
};

// A fully resolved action: ladder entry + concrete endpoints.
struct ActionInstance {
    ActionSpec spec;
    std::string vuln_name;  // display name for local/remote; empty for connect
    std::string source;
    std::string target;  // == source for local actions

    std::string display() const {
        return vuln_name.empty() ? spec.name : vuln_name;
    }
};

struct StepResult {
    double reward = 0.0;
    bool done = false;
    bool terminal = false;
    std::vector<std::string> newly_discovered;
};

class Environment {
public:
    explicit Environment(NetworkTopology topo, EnvConfig cfg = {})
        : topo_(std::move(topo)), cfg_(cfg), credentials_(topo_.credentials()) {}

    const NetworkTopology& topology() const { return topo_; }
    const EnvConfig& config() const { return cfg_; }
    const ActionLadder& ladder() const { return topo_.ladder(); }
    const std::vector<CredentialSpec>& credentials() const { return credentials_; }

    EnvState reset(std::uint64_t seed) const {
        EnvState s;
        s.status.assign(topo_.nodes.size(), kUndiscovered);
        s.creds.assign(credentials_.size(), 0);
        s.probed.assign(topo_.nodes.size(), {});
        s.seed = seed;
        s.status[static_cast<std::size_t>(topo_.node_index(topo_.entry))] = kOwned;
        return s;
    }

    Observation observe(const EnvState& s) const {
        Observation obs;
        obs.ladder_id = topo_.ladder_id;
        obs.t = s.t;
        obs.step_cap = cfg_.step_cap;
        obs.max_nodes = static_cast<int>(topo_.max_nodes());
        obs.owned_count = s.owned_count();
        for (std::size_t i = 0; i < topo_.nodes.size(); ++i) {
            if (s.status[i] == kUndiscovered) continue;
            const NodeTemplate& n = topo_.nodes[i];
            ObservationRow row;
            row.id = n.id;
            row.status = s.status[i];
            if (s.status[i] == kOwned) {
                row.properties = n.properties;
                for (const auto& v : n.local_vulns)
                    row.local_attacks.emplace_back(v.action_index, v.name);
            } else {
                row.properties = s.probed[i];
            }
            for (const auto& v : n.remote_vulns)
                row.remote_attacks.emplace_back(v.action_index, v.name);
            obs.rows.push_back(std::move(row));
        }
        for (std::size_t c = 0; c < credentials_.size(); ++c)
            if (s.creds[c]) obs.credentials.push_back({static_cast<int>(c), credentials_[c]});
        return obs;
    }

    double compromise_ratio(const EnvState& s) const {
        return static_cast<double>(s.owned_count()) / static_cast<double>(topo_.max_nodes());
    }

    // Canonical state key over (owned, discovered, credentials); the
    // tabular-agent and replay-diagnostics identity for states.
    std::string state_key(const EnvState& s) const {
        std::string key;
        key.reserve(s.status.size() + s.creds.size() + 4);
        key += "s:";
        for (auto v : s.status) key += static_cast<char>('0' + v);
        key += "|c:";
        for (auto v : s.creds) key += static_cast<char>('0' + v);
        return key;
    }

    StepResult step(EnvState& s, const ActionInstance& action) const {
        if (s.done) throw InvalidArgument("step called on a finished episode");
        const ActionLadder& lad = ladder();
        if (action.spec.index < 1 || action.spec.index > static_cast<int>(lad.size()))
            throw InvalidArgument("action index outside ladder: " + std::to_string(action.spec.index));
        const int src = topo_.node_index(action.source);
        if (src < 0) throw InvalidArgument("unknown source node: " + action.source);
        if (s.status[static_cast<std::size_t>(src)] != kOwned)
            throw IllegalAction("source node not owned: " + action.source);

        StepResult res;
        const ActionSpec& spec = lad[static_cast<std::size_t>(action.spec.index - 1)];
        switch (spec.kind) {
            case ActionKind::Local:
                res.reward = apply_vuln(s, src, spec.index, ActionKind::Local, res);
                break;
            case ActionKind::Remote: {
                const int tgt = topo_.node_index(action.target);
                if (tgt < 0) throw InvalidArgument("unknown target node: " + action.target);
                if (s.status[static_cast<std::size_t>(tgt)] == kUndiscovered) {
                    res.reward = cfg_.probe_penalty;  // blind probe; reveals nothing
                } else {
                    res.reward = apply_vuln(s, tgt, spec.index, ActionKind::Remote, res);
                }
                break;
            }
            case ActionKind::Connect: {
                const int tgt = topo_.node_index(action.target);
                if (tgt < 0) throw InvalidArgument("unknown target node: " + action.target);
                res.reward = connect(s, tgt, spec.service, res);
                break;
            }
        }

        s.t += 1;
        if (s.t >= cfg_.step_cap) s.done = true;
        s.cumulative_reward += res.reward;
        res.done = s.done;
        res.terminal = s.terminal;
        return res;
    }

    // Every executable (action, source, target) triple, in canonical order:
    // local attacks of owned nodes, then remote attacks against visible
    // nodes, then credentialed connects.
    std::vector<ActionInstance> legal_actions(const Observation& obs) const {
        return legal_actions_impl(obs);
    }

    static std::vector<ActionInstance> legal_actions_impl(const Observation& obs) {
        const ActionLadder& lad = ladder_by_id(obs.ladder_id);
        std::vector<ActionInstance> out;
        std::string first_owned;
        for (const auto& row : obs.rows)
            if (row.status == kOwned) {
                first_owned = row.id;
                break;
            }
        auto owned_source_for = [&obs, &first_owned](const std::string& target) -> std::optional<std::string> {
            if (!first_owned.empty() && first_owned != target) return first_owned;
            for (const auto& row : obs.rows)
                if (row.status == kOwned && row.id != target) return row.id;
            return std::nullopt;
        };

        for (const auto& row : obs.rows) {
            if (row.status != kOwned) continue;
            for (const auto& [idx, name] : row.local_attacks)
                out.push_back({lad[static_cast<std::size_t>(idx - 1)], name, row.id, row.id});
        }
        for (const auto& row : obs.rows) {
            for (const auto& [idx, name] : row.remote_attacks) {
                auto src = owned_source_for(row.id);
                if (src) out.push_back({lad[static_cast<std::size_t>(idx - 1)], name, *src, row.id});
            }
        }
        for (const auto& kc : obs.credentials) {
            auto it = std::find_if(lad.begin(), lad.end(), [&kc](const ActionSpec& a) {
                return a.kind == ActionKind::Connect && a.service == kc.cred.service;
            });
            if (it == lad.end()) continue;
            auto src = owned_source_for(kc.cred.target);
            if (src) out.push_back({*it, "", *src, kc.cred.target});
        }
        return out;
    }

    // Mask over ladder indices (0-based positions) with at least one legal triple.
    static std::vector<std::uint8_t> legal_mask(const Observation& obs,
                                                const std::vector<ActionInstance>& legal) {
        std::vector<std::uint8_t> mask(ladder_by_id(obs.ladder_id).size(), 0);
        for (const auto& a : legal) mask[static_cast<std::size_t>(a.spec.index - 1)] = 1;
        return mask;
    }

    // Deterministic resolution of a ladder choice to a concrete triple: the
    // first legal instance carrying that index.
    static std::optional<ActionInstance> resolve(int ladder_pos,
                                                 const std::vector<ActionInstance>& legal) {
        for (const auto& a : legal)
            if (a.spec.index - 1 == ladder_pos) return a;
        return std::nullopt;
    }

private:
    // Applies the matching vulnerability on `node`; returns the step reward.
    double apply_vuln(EnvState& s, int node, int index, ActionKind kind, StepResult& res) const {
        const NodeTemplate& n = topo_.nodes[static_cast<std::size_t>(node)];
        const auto& vulns = kind == ActionKind::Local ? n.local_vulns : n.remote_vulns;
        const Vulnerability* found = nullptr;
        for (const auto& v : vulns)
            if (v.action_index == index) {
                found = &v;
                break;
            }
        if (!found) return cfg_.probe_penalty;  // node does not expose this attack

        bool new_info = false;
        for (const auto& o : found->outcomes) {
            switch (o.kind) {
                case VulnOutcome::Kind::LeakCredential: {
                    const int c = credential_index(o.cred_id, o.target, o.service);
                    if (c >= 0 && !s.creds[static_cast<std::size_t>(c)]) {
                        s.creds[static_cast<std::size_t>(c)] = 1;
                        new_info = true;
                    }
                    new_info |= discover(s, o.target, res);
                    break;
                }
                case VulnOutcome::Kind::RevealNode:
                    new_info |= discover(s, o.target, res);
                    break;
                case VulnOutcome::Kind::RevealProperty: {
                    auto& props = s.probed[static_cast<std::size_t>(node)];
                    if (std::find(props.begin(), props.end(), o.property) == props.end())
                        props.push_back(o.property);
                    break;  // informational; no reward effect
                }
                case VulnOutcome::Kind::Nothing:
                    break;
            }
        }
        return new_info ? 0.0 : cfg_.probe_penalty;
    }

    double connect(EnvState& s, int tgt, const std::string& service, StepResult&) const {
        bool have_cred = false;
        const NodeTemplate& node = topo_.nodes[static_cast<std::size_t>(tgt)];
        for (std::size_t c = 0; c < credentials_.size(); ++c)
            if (s.creds[c] && credentials_[c].target == node.id && credentials_[c].service == service) {
                have_cred = true;
                break;
            }
        if (!have_cred) return cfg_.probe_penalty;  // credentialless connection attempt
        if (s.status[static_cast<std::size_t>(tgt)] == kOwned) return 0.0;  // repeat
        s.status[static_cast<std::size_t>(tgt)] = kOwned;
        if (node.flag) {
            s.done = true;
            s.terminal = true;
        }
        return node.value;
    }

    bool discover(EnvState& s, const std::string& id, StepResult& res) const {
        const int i = topo_.node_index(id);
        if (i < 0 || s.status[static_cast<std::size_t>(i)] != kUndiscovered) return false;
        s.status[static_cast<std::size_t>(i)] = kDiscovered;
        res.newly_discovered.push_back(id);
        return true;
    }

    int credential_index(const std::string& id, const std::string& target,
                         const std::string& service) const {
        for (std::size_t c = 0; c < credentials_.size(); ++c)
            if (credentials_[c].id == id && credentials_[c].target == target &&
                credentials_[c].service == service)
                return static_cast<int>(c);
        return -1;
    }

    NetworkTopology topo_;
    EnvConfig cfg_;
    std::vector<CredentialSpec> credentials_;
};

// Fixed-length numeric view of an observation: one slot per node
// ({undiscovered, discovered, owned} -> {0, 0.5, 1}), one known-bit per
// topology credential, then normalized step count and compromise ratio.
inline std::vector<double> encode_observation(const Observation& obs, const NetworkTopology& topo) {
    const auto creds = topo.credentials();
    std::vector<double> v(topo.max_nodes() + creds.size() + 2, 0.0);
    for (const auto& row : obs.rows) {
        const int i = topo.node_index(row.id);
        if (i < 0) throw InvalidArgument("observation row for unknown node: " + row.id);
        v[static_cast<std::size_t>(i)] = static_cast<double>(row.status) / 2.0;
    }
    for (const auto& kc : obs.credentials)
        v[topo.max_nodes() + static_cast<std::size_t>(kc.cred_index)] = 1.0;
    v[v.size() - 2] = obs.step_cap > 0 ? static_cast<double>(obs.t) / obs.step_cap : 0.0;
    v[v.size() - 1] =
        obs.max_nodes > 0 ? static_cast<double>(obs.owned_count) / obs.max_nodes : 0.0;
    return v;
}

inline std::size_t encoding_dim(const NetworkTopology& topo) {
    return topo.max_nodes() + topo.credentials().size() + 2;
}

}  // namespace redtrace::env
