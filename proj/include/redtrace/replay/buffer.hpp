#pragma once

// Experience storage: FIFO ring buffer with optional TD-error
// prioritisation. Sampling draws i.i.d. from P(i) = p_i^alpha / sum p^alpha
// with importance weights w_i = (N * P(i))^-beta, normalized by the batch
// maximum. A linear scan over priorities is plenty at desk scale.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "redtrace/core.hpp"

namespace redtrace::replay {

struct Transition {
    std::vector<double> s;
    int a = 0;  // 0-based ladder position
    double r = 0.0;
    std::vector<double> s_next;
    bool d = false;  // environment-terminal (truncation does not count)
    double priority = 0.0;
    std::string state_key;  // canonical identity of s, for diagnostics
};

struct PERConfig {
    double alpha = 0.6;    // prioritisation strength
    double beta = 0.7;     // importance-sampling correction
    double eps0 = 0.01;    // priority floor
};

inline double priority_of(double td_error, double eps0) {
    if (eps0 <= 0.0) throw InvalidArgument("priority floor must be positive");
    return std::abs(td_error) + eps0;
}

struct SampledBatch {
    std::vector<std::size_t> indices;
    std::vector<const Transition*> transitions;
    std::vector<double> weights;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 20000) : capacity_(capacity) {
        if (capacity_ == 0) throw InvalidArgument("replay capacity must be positive");
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }

    const Transition& at(std::size_t i) const { return items_[physical(i)]; }

    // Appends, evicting the oldest item at capacity. New transitions enter
    // at the current maximum priority so they are replayed at least once
    // with high probability.
    void push(Transition t) {
        t.priority = max_priority();
        if (items_.size() < capacity_) {
            items_.push_back(std::move(t));
        } else {
            items_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    double max_priority() const {
        double m = 1.0;  // fresh-buffer default
        bool any = false;
        for (const auto& t : items_) {
            if (!any || t.priority > m) m = t.priority;
            any = true;
        }
        return m;
    }

    SampledBatch sample_uniform(std::size_t k, Rng& rng) const {
        if (items_.empty()) throw EmptyBufferError("sample from empty replay buffer");
        if (k == 0) throw InvalidArgument("batch size must be >= 1");
        SampledBatch batch;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t idx = rng.below(items_.size());
            batch.indices.push_back(idx);
            batch.transitions.push_back(&items_[physical(idx)]);
            batch.weights.push_back(1.0);
        }
        return batch;
    }

    // Sampling probabilities under the current priorities.
    std::vector<double> probabilities(const PERConfig& cfg) const {
        std::vector<double> p(items_.size());
        double total = 0.0;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            p[i] = std::pow(items_[physical(i)].priority, cfg.alpha);
            total += p[i];
        }
        for (auto& v : p) v /= total;
        return p;
    }

    SampledBatch sample_prioritized(std::size_t k, const PERConfig& cfg, Rng& rng) const {
        if (items_.empty()) throw EmptyBufferError("sample from empty replay buffer");
        if (k == 0) throw InvalidArgument("batch size must be >= 1");
        const auto prob = probabilities(cfg);
        std::vector<double> cum(prob.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < prob.size(); ++i) {
            acc += prob[i];
            cum[i] = acc;
        }
        cum.back() = 1.0;

        SampledBatch batch;
        const double n = static_cast<double>(items_.size());
        double wmax = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double u = rng.real01();
            std::size_t idx = static_cast<std::size_t>(
                std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
            if (idx >= items_.size()) idx = items_.size() - 1;
            batch.indices.push_back(idx);
            batch.transitions.push_back(&items_[physical(idx)]);
            const double w = std::pow(n * prob[idx], -cfg.beta);
            batch.weights.push_back(w);
            if (w > wmax) wmax = w;
        }
        if (wmax > 0.0)
            for (auto& w : batch.weights) w /= wmax;
        return batch;
    }

    // Refreshes priorities of the sampled indices from their new TD errors.
    void update_priorities(const std::vector<std::size_t>& indices,
                           const std::vector<double>& td_errors, double eps0) {
        if (indices.size() != td_errors.size())
            throw InvalidArgument("update_priorities: index/error length mismatch");
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] >= items_.size())
                throw InvalidArgument("update_priorities: index out of range");
            items_[physical(indices[i])].priority = priority_of(td_errors[i], eps0);
        }
    }

private:
    // Logical index 0 is the oldest stored transition.
    std::size_t physical(std::size_t logical) const {
        return items_.size() < capacity_ ? logical : (head_ + logical) % capacity_;
    }

    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> items_;
};

}  // namespace redtrace::replay
