#pragma once

// Minimal dense network: affine layers with ReLU on hidden layers and an
// identity output, trained by hand-rolled backprop. Doubles throughout so
// finite-difference gradient checks hold to tight tolerances. No tensor
// framework on purpose.

#include <cmath>
#include <cstdint>
#include <vector>

#include "redtrace/core.hpp"

namespace redtrace::agents {

using Vec = std::vector<double>;

struct MlpSpec {
    std::vector<int> layer_sizes;  // input, hidden..., output

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    std::size_t layer_count() const { return layer_sizes.size() - 1; }

    static MlpSpec make(int input, int hidden_width, int hidden_depth, int output) {
        MlpSpec s;
        s.layer_sizes.push_back(input);
        for (int i = 0; i < hidden_depth; ++i) s.layer_sizes.push_back(hidden_width);
        s.layer_sizes.push_back(output);
        return s;
    }
};

struct MlpParams {
    MlpSpec spec;
    std::vector<Vec> weights;  // [l]: rows = out, cols = in, row-major
    std::vector<Vec> biases;   // [l]: out

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }
    Vec flatten() const {
        Vec out;
        out.reserve(parameter_count());
        for (std::size_t l = 0; l < weights.size(); ++l) {
            out.insert(out.end(), weights[l].begin(), weights[l].end());
            out.insert(out.end(), biases[l].begin(), biases[l].end());
        }
        return out;
    }
    void unflatten(const Vec& flat) {
        std::size_t k = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) {
            for (auto& w : weights[l]) w = flat[k++];
            for (auto& b : biases[l]) b = flat[k++];
        }
        if (k != flat.size()) throw InvalidArgument("unflatten: size mismatch");
    }
};

// Gradients share the parameter layout.
using MlpGrads = MlpParams;

inline MlpParams mlp_zeros(const MlpSpec& spec) {
    if (spec.layer_sizes.size() < 2) throw InvalidArgument("mlp needs at least input and output");
    for (int s : spec.layer_sizes)
        if (s < 1) throw InvalidArgument("mlp layer sizes must be positive");
    MlpParams p;
    p.spec = spec;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        const auto rows = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
        const auto cols = static_cast<std::size_t>(spec.layer_sizes[l]);
        p.weights.emplace_back(rows * cols, 0.0);
        p.biases.emplace_back(rows, 0.0);
    }
    return p;
}

// Glorot-uniform init, deterministic from the seed.
inline MlpParams mlp_init(const MlpSpec& spec, std::uint64_t seed) {
    MlpParams p = mlp_zeros(spec);
    Rng rng(seed);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const double fan_in = spec.layer_sizes[l];
        const double fan_out = spec.layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (auto& w : p.weights[l]) w = rng.uniform(-limit, limit);
    }
    return p;
}

struct ForwardCache {
    std::vector<Vec> pre;   // pre-activation per layer
    std::vector<Vec> post;  // post-activation per layer; post[0] = input
};

inline Vec mlp_forward(const MlpParams& p, const Vec& x, ForwardCache* cache = nullptr) {
    if (static_cast<int>(x.size()) != p.spec.input_size())
        throw InvalidArgument("mlp_forward: input dimension mismatch");
    Vec cur = x;
    if (cache) {
        cache->pre.clear();
        cache->post.clear();
        cache->post.push_back(cur);
    }
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const auto rows = static_cast<std::size_t>(p.spec.layer_sizes[l + 1]);
        const auto cols = static_cast<std::size_t>(p.spec.layer_sizes[l]);
        Vec next(rows);
        const double* W = p.weights[l].data();
        for (std::size_t r = 0; r < rows; ++r) {
            double acc = p.biases[l][r];
            const double* wr = W + r * cols;
            for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * cur[c];
            next[r] = acc;
        }
        if (cache) cache->pre.push_back(next);
        if (l + 1 < p.weights.size())
            for (auto& v : next) v = v > 0.0 ? v : 0.0;  // ReLU on hidden layers
        cur = std::move(next);
        if (cache) cache->post.push_back(cur);
    }
    return cur;
}

// Accumulates dL/dparams for one sample given dL/doutput.
inline void mlp_backward(const MlpParams& p, const ForwardCache& cache, const Vec& dout,
                         MlpGrads& grads) {
    Vec delta = dout;
    for (std::size_t li = p.weights.size(); li-- > 0;) {
        const auto rows = static_cast<std::size_t>(p.spec.layer_sizes[li + 1]);
        const auto cols = static_cast<std::size_t>(p.spec.layer_sizes[li]);
        if (li + 1 < p.weights.size()) {
            // ReLU derivative of this layer's activation, applied on the way down.
            for (std::size_t r = 0; r < rows; ++r)
                if (cache.pre[li][r] <= 0.0) delta[r] = 0.0;
        }
        const Vec& input = cache.post[li];
        double* gW = grads.weights[li].data();
        for (std::size_t r = 0; r < rows; ++r) {
            const double d = delta[r];
            if (d == 0.0) continue;
            grads.biases[li][r] += d;
            double* gr = gW + r * cols;
            for (std::size_t c = 0; c < cols; ++c) gr[c] += d * input[c];
        }
        if (li > 0) {
            Vec prev(cols, 0.0);
            const double* W = p.weights[li].data();
            for (std::size_t r = 0; r < rows; ++r) {
                const double d = delta[r];
                if (d == 0.0) continue;
                const double* wr = W + r * cols;
                for (std::size_t c = 0; c < cols; ++c) prev[c] += d * wr[c];
            }
            delta = std::move(prev);
        }
    }
}

// ----- optimizers -------------------------------------------------------

// Adam with the conventional defaults; plain SGD retained because its update
// is linear in the gradient, which some tests rely on.
class GradientDescent {
public:
    enum class Kind { Adam, Sgd };

    explicit GradientDescent(Kind kind = Kind::Adam, double lr = 0.005, double beta1 = 0.9,
                             double beta2 = 0.999, double eps = 1e-8)
        : kind_(kind), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    static GradientDescent from_name(const std::string& name, double lr) {
        if (name == "adam") return GradientDescent(Kind::Adam, lr);
        if (name == "sgd") return GradientDescent(Kind::Sgd, lr);
        throw InvalidArgument("unknown optimizer: " + name);
    }

    double learning_rate() const { return lr_; }

    void step(MlpParams& params, const MlpGrads& grads) {
        if (kind_ == Kind::Sgd) {
            for (std::size_t l = 0; l < params.weights.size(); ++l) {
                for (std::size_t i = 0; i < params.weights[l].size(); ++i)
                    params.weights[l][i] -= lr_ * grads.weights[l][i];
                for (std::size_t i = 0; i < params.biases[l].size(); ++i)
                    params.biases[l][i] -= lr_ * grads.biases[l][i];
            }
            return;
        }
        if (m_.weights.empty()) {
            m_ = mlp_zeros(params.spec);
            v_ = mlp_zeros(params.spec);
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        auto update = [&](Vec& p, Vec& m, Vec& v, const Vec& g) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
                v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
                p[i] -= lr_ * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps_);
            }
        };
        for (std::size_t l = 0; l < params.weights.size(); ++l) {
            update(params.weights[l], m_.weights[l], v_.weights[l], grads.weights[l]);
            update(params.biases[l], m_.biases[l], v_.biases[l], grads.biases[l]);
        }
    }

private:
    Kind kind_;
    double lr_, beta1_, beta2_, eps_;
    MlpParams m_, v_;
    std::int64_t t_ = 0;
};

}  // namespace redtrace::agents
