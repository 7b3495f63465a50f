#pragma once

// Fixed-width rendering of an observation, one row per visible node:
// id | status | properties | local_attacks | remote_attacks. Owned rows
// come first, then discovered, each group in lexicographic id order.
// Discovered rows hide properties and local attacks ("--"); owned rows
// show empty lists as "[]".

#include <algorithm>
#include <string>
#include <vector>

#include "redtrace/core.hpp"
#include "redtrace/env/sim.hpp"

namespace redtrace::trace {

inline std::string attack_list(const std::vector<std::pair<int, std::string>>& attacks) {
    std::vector<std::string> names;
    names.reserve(attacks.size());
    for (const auto& [idx, name] : attacks) names.push_back(name);
    return "[" + join(names, ", ") + "]";
}

inline std::string render_state_table(const env::Observation& obs) {
    struct Row {
        std::vector<std::string> cells;
    };
    std::vector<const env::ObservationRow*> ordered;
    for (const auto& row : obs.rows) ordered.push_back(&row);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const env::ObservationRow* a, const env::ObservationRow* b) {
                         const bool ao = a->status == env::kOwned;
                         const bool bo = b->status == env::kOwned;
                         if (ao != bo) return ao;
                         return a->id < b->id;
                     });

    std::vector<Row> rows;
    rows.push_back({{"id", "status", "properties", "local_attacks", "remote_attacks"}});
    for (const auto* r : ordered) {
        const bool owned = r->status == env::kOwned;
        std::string props = owned ? "[" + join(r->properties, ", ") + "]"
                                  : (r->properties.empty() ? "--"
                                                           : "[" + join(r->properties, ", ") + "]");
        std::string locals = owned ? attack_list(r->local_attacks) : "--";
        rows.push_back({{r->id, owned ? "owned" : "discovered", props, locals,
                         attack_list(r->remote_attacks)}});
    }

    std::vector<std::size_t> widths(5, 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < 5; ++c) widths[c] = std::max(widths[c], row.cells[c].size());

    std::string out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string line;
        for (std::size_t c = 0; c < 5; ++c) {
            std::string cell = rows[i].cells[c];
            cell.resize(widths[c], ' ');
            line += cell;
            if (c + 1 < 5) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
        if (i == 0) {
            std::string rule;
            for (std::size_t c = 0; c < 5; ++c) {
                rule += std::string(widths[c], '-');
                if (c + 1 < 5) rule += "  ";
            }
            out += rule + "\n";
        }
    }
    return out;
}

}  // namespace redtrace::trace
