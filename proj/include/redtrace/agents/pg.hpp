#pragma once

// Clipped-surrogate policy-gradient update over one episode rollout, with a
// learned value baseline and an optional entropy bonus. Probabilities are
// masked softmaxes over the legal ladder positions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "redtrace/agents/mlp.hpp"

namespace redtrace::agents {

struct RolloutStep {
    Vec state;
    int action = 0;  // 0-based ladder position
    double reward = 0.0;
    Vec old_logits;  // policy output at collection time
    std::vector<std::uint8_t> mask;
};

struct PgConfig {
    double gamma = 0.95;
    double clip = 0.2;
    double entropy_coef = 0.01;
    int epochs = 4;
};

struct PgDiagnostics {
    double mean_ratio = 1.0;
    double mean_entropy = 0.0;
    double policy_objective = 0.0;
    double value_loss = 0.0;
    Vec mean_logits;  // episode-mean policy logits after the update
};

// Softmax restricted to masked-in positions; masked-out entries get 0.
inline Vec masked_softmax(const Vec& logits, const std::vector<std::uint8_t>& mask) {
    if (logits.size() != mask.size()) throw InvalidArgument("masked_softmax: size mismatch");
    double best = -1e300;
    bool any = false;
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (mask[i] && (!any || logits[i] > best)) {
            best = logits[i];
            any = true;
        }
    if (!any) throw IllegalAction("masked_softmax: empty mask");
    Vec p(logits.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!mask[i]) continue;
        p[i] = std::exp(logits[i] - best);
        total += p[i];
    }
    for (auto& v : p) v /= total;
    return p;
}

inline Vec discounted_returns(const std::vector<RolloutStep>& rollout, double gamma) {
    Vec g(rollout.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = rollout.size(); i-- > 0;) {
        acc = rollout[i].reward + gamma * acc;
        g[i] = acc;
    }
    return g;
}

// Mean clipped surrogate plus entropy bonus (the quantity being maximized)
// and its gradient with respect to the policy parameters.
inline double pg_objective(const MlpParams& policy, const std::vector<RolloutStep>& rollout,
                           const Vec& advantages, double clip, double entropy_coef,
                           MlpGrads* grads_out = nullptr, PgDiagnostics* diag = nullptr) {
    if (rollout.empty()) throw InvalidArgument("pg_objective: empty rollout");
    const double n = static_cast<double>(rollout.size());
    double objective = 0.0;
    double ratio_sum = 0.0;
    double entropy_sum = 0.0;
    ForwardCache cache;
    for (std::size_t t = 0; t < rollout.size(); ++t) {
        const RolloutStep& step = rollout[t];
        const Vec logits = mlp_forward(policy, step.state, grads_out ? &cache : nullptr);
        const Vec p = masked_softmax(logits, step.mask);
        const Vec p_old = masked_softmax(step.old_logits, step.mask);
        const auto a = static_cast<std::size_t>(step.action);
        const double ratio = p[a] / p_old[a];
        const double adv = advantages[t];
        const double unclipped = ratio * adv;
        const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * adv;
        const double surrogate = std::min(unclipped, clipped);

        double entropy = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] > 0.0) entropy -= p[i] * std::log(p[i]);

        objective += (surrogate + entropy_coef * entropy) / n;
        ratio_sum += ratio;
        entropy_sum += entropy;

        if (grads_out) {
            // d(surrogate)/d(ratio) is adv on the active branch, 0 when clipped away.
            const double ds_dratio = unclipped <= clipped ? adv : 0.0;
            Vec dz(logits.size(), 0.0);
            for (std::size_t i = 0; i < logits.size(); ++i) {
                if (!step.mask[i]) continue;
                const double dratio_dz = ratio * ((i == a ? 1.0 : 0.0) - p[i]);
                const double dH_dz = p[i] > 0.0 ? -p[i] * (std::log(p[i]) + entropy) : 0.0;
                dz[i] = (ds_dratio * dratio_dz + entropy_coef * dH_dz) / n;
            }
            mlp_backward(policy, cache, dz, *grads_out);
        }
    }
    if (diag) {
        diag->mean_ratio = ratio_sum / n;
        diag->mean_entropy = entropy_sum / n;
        diag->policy_objective = objective;
    }
    return objective;
}

// Mean squared error of the value head against the discounted returns.
inline double value_loss(const MlpParams& value, const std::vector<RolloutStep>& rollout,
                         const Vec& returns, MlpGrads* grads_out = nullptr) {
    const double n = static_cast<double>(rollout.size());
    double loss = 0.0;
    ForwardCache cache;
    for (std::size_t t = 0; t < rollout.size(); ++t) {
        const Vec v = mlp_forward(value, rollout[t].state, grads_out ? &cache : nullptr);
        const double err = v[0] - returns[t];
        loss += err * err / n;
        if (grads_out) {
            Vec dout(1, 2.0 * err / n);
            mlp_backward(value, cache, dout, *grads_out);
        }
    }
    return loss;
}

// One rollout's worth of optimisation: several ascent epochs on the clipped
// surrogate and descent epochs on the value loss.
inline PgDiagnostics pg_update(MlpParams& policy, MlpParams& value,
                               const std::vector<RolloutStep>& rollout, const PgConfig& cfg,
                               GradientDescent& policy_opt, GradientDescent& value_opt) {
    if (rollout.empty()) throw InvalidArgument("pg_update: empty rollout");
    const Vec returns = discounted_returns(rollout, cfg.gamma);
    Vec advantages(rollout.size());
    for (std::size_t t = 0; t < rollout.size(); ++t) {
        const Vec v = mlp_forward(value, rollout[t].state);
        advantages[t] = returns[t] - v[0];
    }

    PgDiagnostics diag;
    for (int e = 0; e < cfg.epochs; ++e) {
        MlpGrads ascent = mlp_zeros(policy.spec);
        pg_objective(policy, rollout, advantages, cfg.clip, cfg.entropy_coef, &ascent, &diag);
        // The optimizer descends, so feed it the negated ascent direction.
        for (std::size_t l = 0; l < ascent.weights.size(); ++l) {
            for (auto& g : ascent.weights[l]) g = -g;
            for (auto& g : ascent.biases[l]) g = -g;
        }
        policy_opt.step(policy, ascent);

        MlpGrads vgrads = mlp_zeros(value.spec);
        diag.value_loss = value_loss(value, rollout, returns, &vgrads);
        value_opt.step(value, vgrads);
    }

    diag.mean_logits.assign(static_cast<std::size_t>(policy.spec.output_size()), 0.0);
    for (const auto& step : rollout) {
        const Vec logits = mlp_forward(policy, step.state);
        for (std::size_t i = 0; i < logits.size(); ++i)
            diag.mean_logits[i] += logits[i] / static_cast<double>(rollout.size());
    }
    return diag;
}

}  // namespace redtrace::agents
