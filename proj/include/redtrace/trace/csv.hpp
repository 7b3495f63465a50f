#pragma once

// Tabular signal exports. Columns are fixed per signal; reals are printed
// with 17 significant digits so re-import reproduces them exactly.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "redtrace/agents/schedule.hpp"
#include "redtrace/core.hpp"
#include "redtrace/explain/signals.hpp"
#include "redtrace/trace/events.hpp"

namespace redtrace::trace {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_num(int v) { return std::to_string(v); }
inline std::string csv_num(std::int64_t v) { return std::to_string(v); }

inline void save_csv(const Csv& csv, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write csv: " + path);
    out << join(csv.header, ",") << "\n";
    for (const auto& row : csv.rows) out << join(row, ",") << "\n";
}

inline Csv load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read csv: " + path);
    Csv csv;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (first) {
            csv.header = std::move(fields);
            first = false;
        } else {
            csv.rows.push_back(std::move(fields));
        }
    }
    return csv;
}

// Builds the named signal table from a run trace. Signal names double as
// the export schema registry; see the README format notes.
inline Csv export_signal(const RunTrace& trace, const std::string& signal,
                         double phase_threshold = 0.5) {
    Csv csv;
    if (signal == "rewards") {
        csv.header = {"episode", "steps", "cumulative_reward", "final_ct", "discovered", "flag"};
        for (const auto* e : trace.of_kind("episode_end"))
            csv.rows.push_back({csv_num(e->at("episode").get<int>()),
                                csv_num(e->at("steps").get<int>()),
                                csv_num(e->at("reward").get<double>()),
                                csv_num(e->at("ct").get<double>()),
                                csv_num(e->at("discovered").get<int>()),
                                e->at("flag").get<bool>() ? "1" : "0"});
        return csv;
    }
    if (signal == "discovery") {
        csv.header = {"step", "discovered"};
        int step = 0;
        int acc = 1;
        for (const auto* e : trace.of_kind("step")) {
            acc += static_cast<int>(e->at("discovered").size());
            csv.rows.push_back({csv_num(step++), csv_num(acc)});
        }
        return csv;
    }
    if (signal == "phase") {
        csv.header = {"phase", "phase_step", "cumulative_reward"};
        std::vector<double> rewards, cts;
        for (const auto* e : trace.of_kind("step")) {
            rewards.push_back(e->at("reward").get<double>());
            cts.push_back(e->at("ct").get<double>());
        }
        const auto curves = explain::phase_reward_curves(rewards, cts, phase_threshold);
        for (std::size_t i = 0; i < curves.early.size(); ++i)
            csv.rows.push_back({"early", csv_num(static_cast<int>(i)), csv_num(curves.early[i])});
        for (std::size_t i = 0; i < curves.late.size(); ++i)
            csv.rows.push_back({"late", csv_num(static_cast<int>(i)), csv_num(curves.late[i])});
        return csv;
    }
    if (signal == "qvalues") {
        const auto snaps = trace.explain_signal("q_snapshot");
        csv.header = {"episode"};
        std::size_t n_actions = 0;
        if (!snaps.empty()) n_actions = snaps.front()->at("values").size();
        for (std::size_t a = 1; a <= n_actions; ++a) csv.header.push_back("q_" + std::to_string(a));
        csv.header.push_back("dominant");
        for (const auto* e : snaps) {
            std::vector<std::string> row{csv_num(e->at("episode").get<int>())};
            for (const auto& v : e->at("values")) row.push_back(csv_num(v.get<double>()));
            row.push_back(csv_num(e->at("dominant").get<int>()));
            csv.rows.push_back(std::move(row));
        }
        return csv;
    }
    if (signal == "priority") {
        csv.header = {"batch", "episode", "mean_abs_td", "high_count"};
        for (const auto* e : trace.of_kind("batch"))
            csv.rows.push_back({csv_num(e->at("batch").get<int>()),
                                csv_num(e->at("episode").get<int>()),
                                csv_num(e->at("mean_abs_td").get<double>()),
                                csv_num(e->at("high_count").get<int>())});
        return csv;
    }
    if (signal == "confidence") {
        csv.header = {"episode", "entropy", "margin"};
        for (const auto* e : trace.explain_signal("confidence"))
            csv.rows.push_back({csv_num(e->at("episode").get<int>()),
                                csv_num(e->at("entropy").get<double>()),
                                csv_num(e->at("margin").get<double>())});
        return csv;
    }
    if (signal == "dominant") {
        csv.header = {"episode", "action"};
        for (const auto* e : trace.explain_signal("dominant"))
            csv.rows.push_back({csv_num(e->at("episode").get<int>()),
                                csv_num(e->at("action").get<int>())});
        return csv;
    }
    throw InvalidArgument("unknown signal: " + signal);
}

inline Csv export_epsilon(const agents::ExplorationSchedule& schedule, std::int64_t horizon) {
    Csv csv;
    csv.header = {"t", "epsilon"};
    for (const auto& [t, eps] : explain::epsilon_trace(schedule, horizon))
        csv.rows.push_back({csv_num(t), csv_num(eps)});
    return csv;
}

inline const std::vector<std::string>& signal_names() {
    static const std::vector<std::string> names = {
        "rewards", "discovery", "phase", "qvalues", "priority", "confidence", "dominant"};
    return names;
}

}  // namespace redtrace::trace
