#pragma once

// Append-only run log: one JSON object per line, fixed key order, strictly
// increasing sequence numbers, no wall-clock fields. Two runs with the same
// manifest produce byte-identical logs, and the manifest pins the log's
// content hash.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "redtrace/core.hpp"
#include "redtrace/env/sim.hpp"

namespace redtrace::trace {

using ojson = nlohmann::ordered_json;

inline std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot hash missing file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

class TraceWriter {
public:
    TraceWriter(const std::string& path, std::string run_id)
        : path_(path), run_id_(std::move(run_id)), out_(path, std::ios::binary) {
        if (!out_) throw IoError("run " + run_id_ + ": cannot open event log " + path);
    }

    std::int64_t events_written() const { return seq_; }
    const std::string& path() const { return path_; }

    void step(int episode, int t, const env::ActionInstance& action, double reward, double ct,
              const std::vector<std::string>& discovered, bool done) {
        ojson e;
        e["kind"] = "step";
        e["seq"] = seq_;
        e["episode"] = episode;
        e["t"] = t;
        e["action"] = action.spec.index;
        e["name"] = action.display();
        e["source"] = action.source;
        e["target"] = action.target;
        e["reward"] = reward;
        e["ct"] = ct;
        e["discovered"] = discovered;
        e["done"] = done;
        write(e);
    }

    void episode_end(int episode, int steps, double reward, double ct, int discovered, bool flag) {
        ojson e;
        e["kind"] = "episode_end";
        e["seq"] = seq_;
        e["episode"] = episode;
        e["steps"] = steps;
        e["reward"] = reward;
        e["ct"] = ct;
        e["discovered"] = discovered;
        e["flag"] = flag;
        write(e);
        out_.flush();  // episode boundaries are durable
    }

    void batch(int episode, int batch_index, double mean_abs_td, int high_count) {
        ojson e;
        e["kind"] = "batch";
        e["seq"] = seq_;
        e["episode"] = episode;
        e["batch"] = batch_index;
        e["mean_abs_td"] = mean_abs_td;
        e["high_count"] = high_count;
        write(e);
    }

    void explain_snapshot(int episode, const std::vector<double>& values, int dominant_1based) {
        ojson e = explain_base(episode, "q_snapshot");
        e["values"] = values;
        e["dominant"] = dominant_1based;
        write(e);
    }

    void explain_confidence(int episode, double entropy, double margin) {
        ojson e = explain_base(episode, "confidence");
        e["entropy"] = entropy;
        e["margin"] = margin;
        write(e);
    }

    void explain_dominant(int episode, int action_1based) {
        ojson e = explain_base(episode, "dominant");
        e["action"] = action_1based;
        write(e);
    }

    void close() {
        if (out_.is_open()) {
            out_.flush();
            out_.close();
        }
    }

private:
    ojson explain_base(int episode, const char* signal) {
        ojson e;
        e["kind"] = "explain";
        e["seq"] = seq_;
        e["episode"] = episode;
        e["signal"] = signal;
        return e;
    }

    void write(const ojson& e) {
        if (!e.contains("kind") || !e.contains("seq") || !e.contains("episode"))
            throw InvalidArgument("run " + run_id_ + ": malformed trace event");
        out_ << e.dump() << "\n";
        if (!out_) throw IoError("run " + run_id_ + ": write failed on " + path_);
        ++seq_;
    }

    std::string path_;
    std::string run_id_;
    std::ofstream out_;
    std::int64_t seq_ = 0;
};

// Fully parsed run log.
struct RunTrace {
    std::vector<ojson> events;

    std::vector<const ojson*> of_kind(const std::string& kind) const {
        std::vector<const ojson*> out;
        for (const auto& e : events)
            if (e.at("kind") == kind) out.push_back(&e);
        return out;
    }

    std::vector<const ojson*> explain_signal(const std::string& signal) const {
        std::vector<const ojson*> out;
        for (const auto& e : events)
            if (e.at("kind") == "explain" && e.at("signal") == signal) out.push_back(&e);
        return out;
    }
};

inline RunTrace load_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read event log: " + path);
    RunTrace trace;
    std::string line;
    std::int64_t expected_seq = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ojson e;
        try {
            e = ojson::parse(line);
        } catch (const std::exception& ex) {
            throw IntegrityError("corrupt event line in " + path + ": " + ex.what());
        }
        if (e.at("seq").get<std::int64_t>() != expected_seq)
            throw IntegrityError("sequence gap in " + path + " at seq " +
                                 std::to_string(expected_seq));
        ++expected_seq;
        trace.events.push_back(std::move(e));
    }
    return trace;
}

inline void save_manifest(const ojson& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << manifest.dump(2) << "\n";
}

inline ojson load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read manifest: " + path);
    ojson j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IntegrityError("malformed manifest " + path + ": " + e.what());
    }
    return j;
}

}  // namespace redtrace::trace
