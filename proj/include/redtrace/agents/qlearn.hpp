#pragma once

// Value-learning primitives shared by the tabular and deep agents:
// the one-step Q-learning update, masked epsilon-greedy selection and the
// episodic target-network sync rule.

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "redtrace/core.hpp"
#include "redtrace/agents/mlp.hpp"

namespace redtrace::agents {

inline double q_update(double q, double r, double gamma, double max_next, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw InvalidArgument("q_update: alpha must be in (0,1]");
    return q + alpha * (r + gamma * max_next - q);
}

// Epsilon-greedy over ladder positions restricted to the legal mask.
// Greedy ties break toward the lowest position. Returns a 0-based position.
inline int select_action(const Vec& scores, const std::vector<std::uint8_t>& legal, double eps,
                         Rng& rng) {
    if (scores.size() != legal.size())
        throw InvalidArgument("select_action: score/mask length mismatch");
    std::vector<int> legal_positions;
    for (std::size_t i = 0; i < legal.size(); ++i)
        if (legal[i]) legal_positions.push_back(static_cast<int>(i));
    if (legal_positions.empty()) throw IllegalAction("select_action: no legal action");
    if (eps > 0.0 && rng.bernoulli(eps))
        return legal_positions[rng.below(legal_positions.size())];
    int best = legal_positions.front();
    for (int i : legal_positions)
        if (scores[static_cast<std::size_t>(i)] > scores[static_cast<std::size_t>(best)]) best = i;
    return best;
}

// Uniform draw over legal positions.
inline int sample_legal_uniform(const std::vector<std::uint8_t>& legal, Rng& rng) {
    std::vector<int> legal_positions;
    for (std::size_t i = 0; i < legal.size(); ++i)
        if (legal[i]) legal_positions.push_back(static_cast<int>(i));
    if (legal_positions.empty()) throw IllegalAction("no legal action");
    return legal_positions[rng.below(legal_positions.size())];
}

// Copies online parameters into the target network on sync episodes.
inline void target_sync(const MlpParams& online, MlpParams& target, int episode, int sync_every) {
    if (sync_every < 1) throw InvalidArgument("target_sync: sync_every must be >= 1");
    if (episode % sync_every == 0) target = online;
}

// Sparse action-value table over canonical state keys; unseen pairs read 0.
class TabularQ {
public:
    explicit TabularQ(int n_actions) : n_actions_(n_actions) {}

    int actions() const { return n_actions_; }
    std::size_t visited_states() const { return table_.size(); }

    double value(const std::string& key, int action) const {
        auto it = table_.find(key);
        if (it == table_.end()) return 0.0;
        return it->second[static_cast<std::size_t>(action)];
    }

    Vec values(const std::string& key) const {
        auto it = table_.find(key);
        if (it == table_.end()) return Vec(static_cast<std::size_t>(n_actions_), 0.0);
        return it->second;
    }

    double max_value(const std::string& key, const std::vector<std::uint8_t>& legal) const {
        auto it = table_.find(key);
        double best = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < legal.size(); ++i) {
            if (!legal[i]) continue;
            const double v = it == table_.end() ? 0.0 : it->second[i];
            if (!any || v > best) best = v;
            any = true;
        }
        return any ? best : 0.0;
    }

    void update(const std::string& key, int action, double r, double gamma, double max_next,
                double alpha) {
        auto& row = row_for(key);
        auto& q = row[static_cast<std::size_t>(action)];
        q = q_update(q, r, gamma, max_next, alpha);
    }

    void set(const std::string& key, int action, double v) {
        row_for(key)[static_cast<std::size_t>(action)] = v;
    }

private:
    Vec& row_for(const std::string& key) {
        auto it = table_.find(key);
        if (it == table_.end())
            it = table_.emplace(key, Vec(static_cast<std::size_t>(n_actions_), 0.0)).first;
        return it->second;
    }

    int n_actions_;
    std::unordered_map<std::string, Vec> table_;
};

}  // namespace redtrace::agents
