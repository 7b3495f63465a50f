#pragma once

// Action ladders: the fixed, indexed action vocabularies of the two
// environment families. Agents act on ladder indices; nodes bind concrete
// attack names to ladder entries.

#include <string>
#include <vector>

#include "redtrace/core.hpp"

namespace redtrace::env {

enum class ActionKind { Local, Remote, Connect };

inline std::string to_string(ActionKind k) {
    switch (k) {
        case ActionKind::Local: return "local";
        case ActionKind::Remote: return "remote";
        case ActionKind::Connect: return "connect";
    }
    return "?";
}

struct ActionSpec {
    int index = 0;  // 1-based ordinal within the ladder
    ActionKind kind = ActionKind::Local;
    std::string name;  // ladder label, e.g. "connect(SSH)"

    // For Connect entries, the service the credential must match.
    std::string service;
};

using ActionLadder = std::vector<ActionSpec>;

inline ActionSpec local_entry(int i, const std::string& what) {
    return {i, ActionKind::Local, "local(" + what + ")", ""};
}
inline ActionSpec remote_entry(int i, const std::string& what) {
    return {i, ActionKind::Remote, "remote(" + what + ")", ""};
}
inline ActionSpec connect_entry(int i, const std::string& service) {
    return {i, ActionKind::Connect, "connect(" + service + ")", service};
}

// 15-entry ladder shared by all chain environments.
inline const ActionLadder& chain_ladder() {
    static const ActionLadder ladder = {
        local_entry(1, "CrackKeePassX"),
        remote_entry(2, "ProbeLinux"),
        local_entry(3, "ScanBashHistory"),
        remote_entry(4, "ProbeWindows"),
        local_entry(5, "CrackKeePass"),
        connect_entry(6, "SSH"),
        connect_entry(7, "RDP"),
        connect_entry(8, "SSH-key"),
        connect_entry(9, "MySQL"),
        connect_entry(10, "HTTPS"),
        connect_entry(11, "GIT"),
        connect_entry(12, "PING"),
        local_entry(13, "ScanExplorerRecentFiles"),
        local_entry(14, "SudoAttempt"),
        connect_entry(15, "su"),
    };
    return ladder;
}

// 18-entry ladder of the fixed CTF environment.
inline const ActionLadder& ctf_ladder() {
    static const ActionLadder ladder = {
        local_entry(1, "ScanBashHistory"),
        local_entry(2, "ScanExplorerRecentFiles"),
        local_entry(3, "SudoAttempt"),
        local_entry(4, "ExfiltrateFlag"),
        local_entry(5, "CrackKeePassX"),
        remote_entry(6, "ProbeLinux"),
        remote_entry(7, "ProbeWindows"),
        remote_entry(8, "ProbeSQLServer"),
        connect_entry(9, "HTTPS"),
        connect_entry(10, "GIT"),
        connect_entry(11, "SSH"),
        connect_entry(12, "RDP"),
        connect_entry(13, "MySQL"),
        connect_entry(14, "SSH-key"),
        connect_entry(15, "PING"),
        connect_entry(16, "su"),
        remote_entry(17, "ProbeFlagServer"),
        local_entry(18, "CrackKeePass"),
    };
    return ladder;
}

inline const ActionLadder& ladder_by_id(const std::string& id) {
    if (id == "chain15") return chain_ladder();
    if (id == "ctf18") return ctf_ladder();
    throw InvalidArgument("unknown action ladder: " + id);
}

}  // namespace redtrace::env
