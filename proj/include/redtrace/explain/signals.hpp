#pragma once

// Strategic and tactical explainability signals. Everything here is a pure
// function over recorded series; re-running on the same inputs yields
// identical outputs. Action positions are 0-based internally and shifted to
// the 1-based ladder indices only at presentation boundaries.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "redtrace/agents/mlp.hpp"
#include "redtrace/agents/schedule.hpp"
#include "redtrace/core.hpp"

namespace redtrace::explain {

using agents::Vec;

// ----- strategic layer --------------------------------------------------

enum class Phase { Early, Late };

struct PhaseLabel {
    Phase phase = Phase::Early;
    double threshold = 0.5;
};

// Early iff the compromise ratio is strictly below the threshold; the
// boundary itself is Late.
inline PhaseLabel label_phase(double c, double threshold = 0.5) {
    if (c < 0.0 || c > 1.0 || threshold < 0.0 || threshold > 1.0)
        throw InvalidArgument("label_phase: ratio and threshold must lie in [0,1]");
    return {c < threshold ? Phase::Early : Phase::Late, threshold};
}

struct PhaseCurves {
    std::vector<double> early;  // cumulative reward, indexed by phase-local step
    std::vector<double> late;
};

// Splits per-step rewards by phase of the post-step compromise ratio and
// accumulates each half separately.
inline PhaseCurves phase_reward_curves(const std::vector<double>& rewards,
                                       const std::vector<double>& cts, double threshold) {
    if (rewards.size() != cts.size())
        throw InvalidArgument("phase_reward_curves: reward/ratio length mismatch");
    PhaseCurves out;
    double early_acc = 0.0, late_acc = 0.0;
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        if (label_phase(cts[i], threshold).phase == Phase::Early) {
            early_acc += rewards[i];
            out.early.push_back(early_acc);
        } else {
            late_acc += rewards[i];
            out.late.push_back(late_acc);
        }
    }
    return out;
}

// Cumulative count of distinct nodes ever discovered, per global step.
// Starts at 1: the entry foothold is always visible.
inline std::vector<int> discovery_curve(const std::vector<int>& new_discoveries_per_step) {
    std::vector<int> out;
    out.reserve(new_discoveries_per_step.size());
    int acc = 1;
    for (int d : new_discoveries_per_step) {
        acc += d;
        out.push_back(acc);
    }
    return out;
}

inline std::vector<std::pair<std::int64_t, double>> epsilon_trace(
    const agents::ExplorationSchedule& schedule, std::int64_t horizon) {
    if (horizon < 1) throw InvalidArgument("epsilon_trace: horizon must be >= 1");
    std::vector<std::pair<std::int64_t, double>> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (std::int64_t t = 0; t < horizon; ++t) out.emplace_back(t, agents::epsilon_at(schedule, t));
    return out;
}

// ----- tactical layer -----------------------------------------------------

struct QValueSnapshot {
    int episode = 0;
    Vec mean_values;   // per action, averaged over the episode's distinct states
    int dominant = 0;  // 0-based position; ties break low
};

inline int argmax_low(const Vec& v) {
    int best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
}

inline QValueSnapshot aggregate_action_values(const std::vector<Vec>& score_rows, int episode = 0) {
    if (score_rows.empty()) throw InvalidArgument("aggregate_action_values: no states");
    QValueSnapshot snap;
    snap.episode = episode;
    snap.mean_values.assign(score_rows.front().size(), 0.0);
    for (const auto& row : score_rows) {
        if (row.size() != snap.mean_values.size())
            throw InvalidArgument("aggregate_action_values: ragged score rows");
        for (std::size_t i = 0; i < row.size(); ++i)
            snap.mean_values[i] += row[i] / static_cast<double>(score_rows.size());
    }
    snap.dominant = argmax_low(snap.mean_values);
    return snap;
}

inline QValueSnapshot aggregate_action_values(const std::vector<Vec>& states,
                                              const std::function<Vec(const Vec&)>& value_fn,
                                              int episode = 0) {
    if (states.empty()) throw InvalidArgument("aggregate_action_values: no states");
    std::vector<Vec> rows;
    rows.reserve(states.size());
    for (const auto& s : states) rows.push_back(value_fn(s));
    return aggregate_action_values(rows, episode);
}

struct PriorityStat {
    int batch = 0;
    double mean_abs_td = 0.0;
    int high_priority_count = 0;  // distinct states among reward-filtered samples
};

inline PriorityStat record_priority_stats(const std::vector<double>& td_errors,
                                          const std::vector<double>& rewards,
                                          const std::vector<std::string_view>& state_keys,
                                          double reward_filter) {
    if (td_errors.empty()) throw InvalidArgument("record_priority_stats: empty batch");
    if (td_errors.size() != rewards.size() || rewards.size() != state_keys.size())
        throw InvalidArgument("record_priority_stats: length mismatch");
    PriorityStat stat;
    for (double d : td_errors) stat.mean_abs_td += std::abs(d) / static_cast<double>(td_errors.size());
    std::set<std::string_view> distinct;
    for (std::size_t i = 0; i < rewards.size(); ++i)
        if (rewards[i] > reward_filter) distinct.insert(state_keys[i]);
    stat.high_priority_count = static_cast<int>(distinct.size());
    return stat;
}

// Shannon entropy of the action distribution over log |A|: 1 for uniform,
// 0 for deterministic.
inline double normalized_entropy(const Vec& probs) {
    if (probs.size() < 2) throw InvalidArgument("normalized_entropy: need >= 2 actions");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw InvalidArgument("normalized_entropy: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidArgument("normalized_entropy: probabilities must sum to 1");
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log(p);
    return h / std::log(static_cast<double>(probs.size()));
}

// Top-1 minus top-2 score: the confidence proxy.
inline double logit_margin(const Vec& logits) {
    if (logits.size() < 2) throw InvalidArgument("logit_margin: need >= 2 actions");
    double top1 = -1e300, top2 = -1e300;
    for (double v : logits) {
        if (v > top1) {
            top2 = top1;
            top1 = v;
        } else if (v > top2) {
            top2 = v;
        }
    }
    return top1 - top2;
}

struct ConfidenceSignal {
    int episode = 0;
    double entropy = 0.0;  // normalized
    double margin = 0.0;
};

// Argmax of the element-wise mean distribution; ties break low.
inline int dominant_action(const std::vector<Vec>& step_probs) {
    if (step_probs.empty()) throw InvalidArgument("dominant_action: empty sequence");
    Vec mean(step_probs.front().size(), 0.0);
    for (const auto& p : step_probs) {
        if (p.size() != mean.size()) throw InvalidArgument("dominant_action: ragged distributions");
        for (std::size_t i = 0; i < p.size(); ++i)
            mean[i] += p[i] / static_cast<double>(step_probs.size());
    }
    return argmax_low(mean);
}

// ----- alerts -------------------------------------------------------------

struct Alert {
    enum class Kind { Collapse, LockIn };
    Kind kind = Kind::Collapse;
    int onset = 0;  // episode position in the analysed series
    // evidence
    int action = -1;         // lock-in: the repeated action (0-based)
    int run_length = 0;      // lock-in: length of the dominant run from onset
    double entropy = 0.0;    // collapse: entropy at onset
    double margin = 0.0;     // collapse: margin at onset
    bool reward_intact = false;  // collapse: reward had not degraded before onset
};

// Earliest episode from which one dominant action persists for at least k
// consecutive episodes.
inline std::optional<Alert> detect_lock_in(const std::vector<int>& dominants, int k) {
    if (k < 2) throw InvalidArgument("detect_lock_in: window must be >= 2");
    const int n = static_cast<int>(dominants.size());
    for (int start = 0; start + k <= n; ++start) {
        bool run = true;
        for (int i = start + 1; i < start + k; ++i)
            if (dominants[static_cast<std::size_t>(i)] !=
                dominants[static_cast<std::size_t>(start)]) {
                run = false;
                break;
            }
        if (!run) continue;
        Alert a;
        a.kind = Alert::Kind::LockIn;
        a.onset = start;
        a.action = dominants[static_cast<std::size_t>(start)];
        int len = k;
        while (start + len < n &&
               dominants[static_cast<std::size_t>(start + len)] == a.action)
            ++len;
        a.run_length = len;
        return a;
    }
    return std::nullopt;
}

// Earliest episode where entropy has fallen below the entropy threshold
// while the margin exceeds the margin threshold. The evidence records
// whether reward was still non-degraded over the preceding window, the
// early-warning signature.
inline std::optional<Alert> detect_collapse(const std::vector<double>& entropy_series,
                                            const std::vector<double>& margin_series,
                                            const std::vector<double>& reward_series,
                                            double entropy_threshold, double margin_threshold,
                                            int reward_window = 5) {
    if (entropy_series.size() != margin_series.size() ||
        entropy_series.size() != reward_series.size())
        throw InvalidArgument("detect_collapse: series length mismatch");
    if (entropy_series.size() < 2) throw InvalidArgument("detect_collapse: need >= 2 episodes");
    for (std::size_t e = 0; e < entropy_series.size(); ++e) {
        if (entropy_series[e] < entropy_threshold && margin_series[e] > margin_threshold) {
            Alert a;
            a.kind = Alert::Kind::Collapse;
            a.onset = static_cast<int>(e);
            a.entropy = entropy_series[e];
            a.margin = margin_series[e];
            const std::size_t back = std::min<std::size_t>(e, static_cast<std::size_t>(reward_window));
            a.reward_intact = reward_series[e] >= reward_series[e - back];
            return a;
        }
    }
    return std::nullopt;
}

}  // namespace redtrace::explain
