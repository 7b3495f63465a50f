#pragma once

// Attacker policies behind one interface, plus the instrumented episode
// loop. Agents pick ladder positions from masked scores; the loop resolves
// them to concrete (action, source, target) triples, steps the simulator,
// feeds learning, and fires hooks for every step, batch update and episode.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "redtrace/agents/dql.hpp"
#include "redtrace/agents/mlp.hpp"
#include "redtrace/agents/pg.hpp"
#include "redtrace/agents/qlearn.hpp"
#include "redtrace/agents/schedule.hpp"
#include "redtrace/env/sim.hpp"
#include "redtrace/replay/buffer.hpp"

namespace redtrace::agents {

struct AgentConfig {
    std::string kind = "dql";  // random | tabular | dql | dql-per | pg
    double learning_rate = 0.005;
    double gamma = 0.95;
    int batch_size = 128;
    std::size_t buffer_capacity = 20000;
    int target_sync_every = 10;  // episodes
    ExplorationSchedule schedule = ExplorationSchedule::standard(0.1, 0.9, 0, 5000);
    bool per_enabled = false;
    replay::PERConfig per;
    int hidden_width = 64;
    int hidden_depth = 3;  // 3 for small presets, 5 for large
    std::string optimizer = "adam";
    int updates_per_step = 1;
    double huber_delta = 0.0;   // 0 = squared TD loss
    double tabular_alpha = 1.0;  // exact asynchronous sweeps in a deterministic env
    double clip = 0.2;
    double entropy_coef = 0.01;
    int pg_epochs = 4;
};

struct AgentStepInput {
    const Vec& encoded;
    const std::string& state_key;
    const std::vector<std::uint8_t>& legal_mask;
};

struct BatchHookData {
    int episode = 0;
    std::vector<double> td_errors;
    std::vector<double> rewards;
    std::vector<std::string_view> state_keys;
};
using BatchHook = std::function<void(const BatchHookData&)>;

class Agent {
public:
    virtual ~Agent() = default;
    virtual std::string kind() const = 0;
    virtual int select(const AgentStepInput& in) = 0;  // 0-based ladder position
    virtual void observe(const AgentStepInput& /*prev*/, int /*action*/, double /*reward*/,
                         const AgentStepInput& /*next*/, bool /*terminal*/,
                         const BatchHook& /*on_batch*/) {}
    virtual void end_episode(int /*episode*/) {}

    // Per-action value estimates (Q-values or policy logits) for snapshots.
    virtual std::optional<Vec> action_scores(const Vec& /*encoded*/,
                                             const std::string& /*key*/) const {
        return std::nullopt;
    }
    // Per-step action distribution, for stochastic policies.
    virtual std::optional<Vec> action_probs(const Vec& /*encoded*/,
                                            const std::vector<std::uint8_t>& /*mask*/) const {
        return std::nullopt;
    }
};

// ----- concrete agents --------------------------------------------------

class RandomAgent : public Agent {
public:
    explicit RandomAgent(std::uint64_t seed) : rng_(derive_seed(seed, "act")) {}
    std::string kind() const override { return "random"; }
    int select(const AgentStepInput& in) override {
        return sample_legal_uniform(in.legal_mask, rng_);
    }

private:
    Rng rng_;
};

class TabularAgent : public Agent {
public:
    TabularAgent(const AgentConfig& cfg, int n_actions, std::uint64_t seed)
        : cfg_(cfg), table_(n_actions), rng_(derive_seed(seed, "act")) {}

    std::string kind() const override { return "tabular"; }

    int select(const AgentStepInput& in) override {
        const double eps = epsilon_at(cfg_.schedule, global_step_++);
        return select_action(table_.values(in.state_key), in.legal_mask, eps, rng_);
    }

    void observe(const AgentStepInput& prev, int action, double reward,
                 const AgentStepInput& next, bool terminal, const BatchHook&) override {
        const double max_next = terminal ? 0.0 : table_.max_value(next.state_key, next.legal_mask);
        table_.update(prev.state_key, action, reward, cfg_.gamma, max_next, cfg_.tabular_alpha);
    }

    std::optional<Vec> action_scores(const Vec&, const std::string& key) const override {
        return table_.values(key);
    }

    const TabularQ& table() const { return table_; }

private:
    AgentConfig cfg_;
    TabularQ table_;
    Rng rng_;
    std::int64_t global_step_ = 0;
};

class DqlAgent : public Agent {
public:
    DqlAgent(const AgentConfig& cfg, int input_dim, int n_actions, std::uint64_t seed)
        : cfg_(cfg),
          online_(mlp_init(MlpSpec::make(input_dim, cfg.hidden_width, cfg.hidden_depth, n_actions),
                           derive_seed(seed, "params"))),
          target_(online_),
          opt_(GradientDescent::from_name(cfg.optimizer, cfg.learning_rate)),
          buffer_(cfg.buffer_capacity),
          act_rng_(derive_seed(seed, "act")),
          replay_rng_(derive_seed(seed, "replay")) {}

    std::string kind() const override { return cfg_.per_enabled ? "dql-per" : "dql"; }

    int select(const AgentStepInput& in) override {
        const double eps = epsilon_at(cfg_.schedule, global_step_++);
        return select_action(mlp_forward(online_, in.encoded), in.legal_mask, eps, act_rng_);
    }

    void observe(const AgentStepInput& prev, int action, double reward,
                 const AgentStepInput& next, bool terminal, const BatchHook& on_batch) override {
        replay::Transition tr;
        tr.s = prev.encoded;
        tr.a = action;
        tr.r = reward;
        tr.s_next = next.encoded;
        tr.d = terminal;
        tr.state_key = prev.state_key;
        buffer_.push(std::move(tr));

        if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return;
        for (int u = 0; u < cfg_.updates_per_step; ++u) {
            auto batch = cfg_.per_enabled
                             ? buffer_.sample_prioritized(static_cast<std::size_t>(cfg_.batch_size),
                                                          cfg_.per, replay_rng_)
                             : buffer_.sample_uniform(static_cast<std::size_t>(cfg_.batch_size),
                                                      replay_rng_);
            auto res = dql_train_step(online_, target_, batch.transitions, cfg_.gamma, opt_,
                                      cfg_.per_enabled ? batch.weights : std::vector<double>{},
                                      cfg_.huber_delta);
            if (cfg_.per_enabled)
                buffer_.update_priorities(batch.indices, res.td_errors, cfg_.per.eps0);
            if (on_batch) {
                BatchHookData data;
                data.episode = episode_;
                data.td_errors = res.td_errors;
                data.rewards.reserve(batch.transitions.size());
                data.state_keys.reserve(batch.transitions.size());
                for (const auto* t : batch.transitions) {
                    data.rewards.push_back(t->r);
                    data.state_keys.emplace_back(t->state_key);
                }
                on_batch(data);
            }
        }
    }

    void end_episode(int episode) override {
        episode_ = episode + 1;
        target_sync(online_, target_, episode, cfg_.target_sync_every);
    }

    std::optional<Vec> action_scores(const Vec& encoded, const std::string&) const override {
        return mlp_forward(online_, encoded);
    }

    const MlpParams& parameters() const { return online_; }

private:
    AgentConfig cfg_;
    MlpParams online_, target_;
    GradientDescent opt_;
    replay::ReplayBuffer buffer_;
    Rng act_rng_, replay_rng_;
    std::int64_t global_step_ = 0;
    int episode_ = 0;
};

// Greedy execution of frozen parameters; no replay, no updates.
class ExploitingAgent : public Agent {
public:
    explicit ExploitingAgent(MlpParams params) : params_(std::move(params)) {}

    std::string kind() const override { return "exploit"; }

    int select(const AgentStepInput& in) override {
        Rng unused(0);  // eps = 0: no draws consumed
        return select_action(mlp_forward(params_, in.encoded), in.legal_mask, 0.0, unused);
    }

    std::optional<Vec> action_scores(const Vec& encoded, const std::string&) const override {
        return mlp_forward(params_, encoded);
    }

    const MlpParams& parameters() const { return params_; }

private:
    MlpParams params_;
};

class PgAgent : public Agent {
public:
    PgAgent(const AgentConfig& cfg, int input_dim, int n_actions, std::uint64_t seed)
        : cfg_(cfg),
          policy_(mlp_init(MlpSpec::make(input_dim, cfg.hidden_width, cfg.hidden_depth, n_actions),
                           derive_seed(seed, "params"))),
          value_(mlp_init(MlpSpec::make(input_dim, cfg.hidden_width, cfg.hidden_depth, 1),
                          derive_seed(seed, "value-params"))),
          policy_opt_(GradientDescent::from_name(cfg.optimizer, cfg.learning_rate)),
          value_opt_(GradientDescent::from_name(cfg.optimizer, cfg.learning_rate)),
          rng_(derive_seed(seed, "act")) {}

    std::string kind() const override { return "pg"; }

    int select(const AgentStepInput& in) override {
        const Vec logits = mlp_forward(policy_, in.encoded);
        const Vec p = masked_softmax(logits, in.legal_mask);
        const double u = rng_.real01();
        double acc = 0.0;
        int pos = -1;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] <= 0.0) continue;
            acc += p[i];
            pos = static_cast<int>(i);
            if (u < acc) break;
        }
        last_logits_ = logits;
        return pos;
    }

    void observe(const AgentStepInput& prev, int action, double reward, const AgentStepInput&,
                 bool, const BatchHook&) override {
        rollout_.push_back({prev.encoded, action, reward, last_logits_, prev.legal_mask});
    }

    void end_episode(int) override {
        if (rollout_.empty()) return;
        PgConfig pc;
        pc.gamma = cfg_.gamma;
        pc.clip = cfg_.clip;
        pc.entropy_coef = cfg_.entropy_coef;
        pc.epochs = cfg_.pg_epochs;
        last_diag_ = pg_update(policy_, value_, rollout_, pc, policy_opt_, value_opt_);
        rollout_.clear();
    }

    std::optional<Vec> action_scores(const Vec& encoded, const std::string&) const override {
        return mlp_forward(policy_, encoded);
    }

    std::optional<Vec> action_probs(const Vec& encoded,
                                    const std::vector<std::uint8_t>& mask) const override {
        return masked_softmax(mlp_forward(policy_, encoded), mask);
    }

    const PgDiagnostics& last_diagnostics() const { return last_diag_; }
    const MlpParams& parameters() const { return policy_; }

private:
    AgentConfig cfg_;
    MlpParams policy_, value_;
    GradientDescent policy_opt_, value_opt_;
    Rng rng_;
    Vec last_logits_;
    std::vector<RolloutStep> rollout_;
    PgDiagnostics last_diag_;
};

inline std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, int input_dim, int n_actions,
                                         std::uint64_t seed) {
    if (cfg.kind == "random") return std::make_unique<RandomAgent>(seed);
    if (cfg.kind == "tabular") return std::make_unique<TabularAgent>(cfg, n_actions, seed);
    if (cfg.kind == "dql" || cfg.kind == "dql-per") {
        AgentConfig c = cfg;
        c.per_enabled = cfg.per_enabled || cfg.kind == "dql-per";
        return std::make_unique<DqlAgent>(c, input_dim, n_actions, seed);
    }
    if (cfg.kind == "pg") return std::make_unique<PgAgent>(cfg, input_dim, n_actions, seed);
    throw InvalidArgument("unknown agent kind: " + cfg.kind);
}

// ----- episode loop -------------------------------------------------------

struct EpisodeSummary {
    int episode = 0;
    int steps = 0;
    double cumulative_reward = 0.0;
    double final_ct = 0.0;
    int discovered = 0;  // nodes visible at episode end, entry included
    bool reached_flag = false;
};

struct StepHookData {
    int episode = 0;
    int t = 0;  // post-step step counter
    const env::ActionInstance* action = nullptr;
    double reward = 0.0;
    double ct = 0.0;
    const std::vector<std::string>* newly_discovered = nullptr;
    bool done = false;
};

struct Hooks {
    std::function<void(const StepHookData&)> on_step;
    BatchHook on_batch;
    std::function<void(const EpisodeSummary&)> on_episode_end;
};

// Distinct states visited during the episode, for state-aggregated
// value snapshots.
struct EpisodeStates {
    std::vector<std::string> keys;
    std::vector<Vec> encodings;

    void add(const std::string& key, const Vec& enc) {
        for (const auto& k : keys)
            if (k == key) return;
        keys.push_back(key);
        encodings.push_back(enc);
    }
};

inline EpisodeSummary run_episode(Agent& agent, const env::Environment& environment,
                                  std::uint64_t episode_seed, int episode, const Hooks& hooks,
                                  EpisodeStates* states = nullptr,
                                  std::vector<Vec>* step_probs = nullptr) {
    env::EnvState state = environment.reset(episode_seed);
    const auto& topo = environment.topology();

    env::Observation obs = environment.observe(state);
    auto legal = environment.legal_actions(obs);
    auto mask = env::Environment::legal_mask(obs, legal);
    Vec enc = env::encode_observation(obs, topo);
    std::string key = environment.state_key(state);

    EpisodeSummary summary;
    summary.episode = episode;

    while (!state.done && !legal.empty()) {
        if (states) states->add(key, enc);
        const AgentStepInput in{enc, key, mask};
        if (step_probs) {
            if (auto p = agent.action_probs(enc, mask)) step_probs->push_back(*p);
        }
        const int pos = agent.select(in);
        auto inst = env::Environment::resolve(pos, legal);
        if (!inst) throw IllegalAction("agent chose a masked-out ladder position");
        const env::StepResult res = environment.step(state, *inst);

        env::Observation next_obs = environment.observe(state);
        auto next_legal = environment.legal_actions(next_obs);
        auto next_mask = env::Environment::legal_mask(next_obs, next_legal);
        Vec next_enc = env::encode_observation(next_obs, topo);
        std::string next_key = environment.state_key(state);

        const AgentStepInput next_in{next_enc, next_key, next_mask};
        agent.observe(in, pos, res.reward, next_in, res.terminal, hooks.on_batch);

        if (hooks.on_step) {
            StepHookData data;
            data.episode = episode;
            data.t = state.t;
            data.action = &*inst;
            data.reward = res.reward;
            data.ct = environment.compromise_ratio(state);
            data.newly_discovered = &res.newly_discovered;
            data.done = res.done;
            hooks.on_step(data);
        }

        obs = std::move(next_obs);
        legal = std::move(next_legal);
        mask = std::move(next_mask);
        enc = std::move(next_enc);
        key = std::move(next_key);
    }

    summary.steps = state.t;
    summary.cumulative_reward = state.cumulative_reward;
    summary.final_ct = environment.compromise_ratio(state);
    summary.discovered = state.discovered_count();
    summary.reached_flag = state.terminal;
    agent.end_episode(episode);
    if (hooks.on_episode_end) hooks.on_episode_end(summary);
    return summary;
}

}  // namespace redtrace::agents
