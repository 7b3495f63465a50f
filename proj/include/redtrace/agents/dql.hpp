#pragma once

// Deep Q-learning batch update. TD errors are formed against the target
// network (terminal transitions drop the bootstrap term), the loss is the
// importance-weighted mean squared TD error, and one optimizer step is
// applied. The returned per-sample errors feed replay prioritisation.

#include <algorithm>
#include <cmath>
#include <vector>

#include "redtrace/agents/mlp.hpp"
#include "redtrace/replay/buffer.hpp"

namespace redtrace::agents {

struct DqlTrainResult {
    std::vector<double> td_errors;
    double loss = 0.0;
};

inline DqlTrainResult dql_train_step(MlpParams& online, const MlpParams& target,
                                     const std::vector<const replay::Transition*>& batch,
                                     double gamma, GradientDescent& opt,
                                     const std::vector<double>& weights = {},
                                     double huber_delta = 0.0) {
    if (batch.empty()) throw InvalidArgument("dql_train_step: empty batch");
    if (!weights.empty() && weights.size() != batch.size())
        throw InvalidArgument("dql_train_step: weight/batch length mismatch");

    const double k = static_cast<double>(batch.size());
    MlpGrads grads = mlp_zeros(online.spec);
    DqlTrainResult res;
    res.td_errors.reserve(batch.size());

    ForwardCache cache;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const replay::Transition& tr = *batch[i];
        const double w = weights.empty() ? 1.0 : weights[i];
        if (w <= 0.0) throw InvalidArgument("dql_train_step: weights must be positive");

        const Vec q = mlp_forward(online, tr.s, &cache);
        double bootstrap = 0.0;
        if (!tr.d) {
            const Vec qn = mlp_forward(target, tr.s_next);
            bootstrap = gamma * *std::max_element(qn.begin(), qn.end());
        }
        const double delta = tr.r + bootstrap - q[static_cast<std::size_t>(tr.a)];
        res.td_errors.push_back(delta);

        Vec dout(q.size(), 0.0);
        if (huber_delta > 0.0) {
            const double clipped = std::clamp(delta, -huber_delta, huber_delta);
            res.loss += w *
                        (std::abs(delta) <= huber_delta
                             ? 0.5 * delta * delta
                             : huber_delta * (std::abs(delta) - 0.5 * huber_delta)) /
                        k;
            dout[static_cast<std::size_t>(tr.a)] = -w * clipped / k;
        } else {
            res.loss += w * delta * delta / k;
            dout[static_cast<std::size_t>(tr.a)] = -2.0 * w * delta / k;
        }
        mlp_backward(online, cache, dout, grads);
    }

    opt.step(online, grads);
    return res;
}

// Loss surface only (no update); what the gradient-check oracle probes.
inline double dql_loss(const MlpParams& online, const MlpParams& target,
                       const std::vector<const replay::Transition*>& batch, double gamma,
                       const std::vector<double>& weights = {}) {
    const double k = static_cast<double>(batch.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const replay::Transition& tr = *batch[i];
        const double w = weights.empty() ? 1.0 : weights[i];
        const Vec q = mlp_forward(online, tr.s);
        double bootstrap = 0.0;
        if (!tr.d) {
            const Vec qn = mlp_forward(target, tr.s_next);
            bootstrap = gamma * *std::max_element(qn.begin(), qn.end());
        }
        const double delta = tr.r + bootstrap - q[static_cast<std::size_t>(tr.a)];
        loss += w * delta * delta / k;
    }
    return loss;
}

// Gradient of dql_loss with respect to the online parameters, without
// touching optimizer state.
inline MlpGrads dql_loss_grad(const MlpParams& online, const MlpParams& target,
                              const std::vector<const replay::Transition*>& batch, double gamma,
                              const std::vector<double>& weights = {}) {
    const double k = static_cast<double>(batch.size());
    MlpGrads grads = mlp_zeros(online.spec);
    ForwardCache cache;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const replay::Transition& tr = *batch[i];
        const double w = weights.empty() ? 1.0 : weights[i];
        const Vec q = mlp_forward(online, tr.s, &cache);
        double bootstrap = 0.0;
        if (!tr.d) {
            const Vec qn = mlp_forward(target, tr.s_next);
            bootstrap = gamma * *std::max_element(qn.begin(), qn.end());
        }
        const double delta = tr.r + bootstrap - q[static_cast<std::size_t>(tr.a)];
        Vec dout(q.size(), 0.0);
        dout[static_cast<std::size_t>(tr.a)] = -2.0 * w * delta / k;
        mlp_backward(online, cache, dout, grads);
    }
    return grads;
}

}  // namespace redtrace::agents
