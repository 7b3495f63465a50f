#pragma once

// Full instrumented training runs: builds the environment, drives the
// agent through the episode loop, streams events to the run directory and
// seals it with a manifest (config echo + log content hash).
//
// Run directory layout:
//   runs/<run-id>/topology.json   environment, replayable
//   runs/<run-id>/events.log      append-only event stream (JSONL)
//   runs/<run-id>/manifest.json   resolved config + events hash
//   runs/<run-id>/params.json     final network parameters (value/policy agents)
//   runs/<run-id>/signals/*.csv   exported signal tables
//   runs/<run-id>/plots/*.svg     rendered charts (written by explain)
//   runs/<run-id>/report.md       rendered report (written by explain)

#include <filesystem>
#include <string>
#include <vector>

#include "redtrace/agents/run.hpp"
#include "redtrace/env/io.hpp"
#include "redtrace/env/sim.hpp"
#include "redtrace/explain/signals.hpp"
#include "redtrace/trace/csv.hpp"
#include "redtrace/trace/events.hpp"

namespace redtrace::train {

namespace fs = std::filesystem;
using trace::ojson;

// ----- network parameter persistence ------------------------------------

inline ojson params_to_json(const agents::MlpParams& p) {
    ojson j;
    j["layer_sizes"] = p.spec.layer_sizes;
    j["weights"] = p.weights;
    j["biases"] = p.biases;
    return j;
}

inline agents::MlpParams params_from_json(const ojson& j) {
    agents::MlpParams p;
    p.spec.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    p.weights = j.at("weights").get<std::vector<agents::Vec>>();
    p.biases = j.at("biases").get<std::vector<agents::Vec>>();
    return p;
}

// ----- run configuration -------------------------------------------------

struct RunConfig {
    // environment: either a preset/chain spec or an explicit topology file
    std::string preset = "cc10";
    std::string topology_file;
    int chain_pairs = 0;  // > 0: ad-hoc chain instead of a preset
    std::uint64_t env_seed = 0;

    std::string agent = "dql";  // random | tabular | dql | dql-per | pg | exploit:<run-dir>
    int episodes = 20;
    int iterations = 200;  // step cap per episode
    std::vector<std::uint64_t> seeds = {1};

    agents::AgentConfig agent_cfg;
    bool schedule_overridden = false;

    double phase_threshold = 0.5;
    double reward_filter = 2.0;  // high-priority state counting
    bool export_signals = true;
    std::string out_dir = "runs";
};

inline env::NetworkTopology build_run_topology(const RunConfig& cfg) {
    if (!cfg.topology_file.empty()) return env::load_topology(cfg.topology_file);
    if (cfg.chain_pairs > 0) return env::build_chain(cfg.chain_pairs, cfg.env_seed);
    return env::build_preset(cfg.preset, cfg.env_seed);
}

inline std::string env_label(const RunConfig& cfg) {
    if (!cfg.topology_file.empty()) return fs::path(cfg.topology_file).stem().string();
    if (cfg.chain_pairs > 0) return "chain" + std::to_string(cfg.chain_pairs);
    return cfg.preset;
}

inline std::string agent_label(const std::string& agent) {
    if (agent.rfind("exploit:", 0) == 0) return "exploit";
    return agent;
}

inline std::string run_id(const RunConfig& cfg, std::uint64_t seed) {
    return env_label(cfg) + "-" + agent_label(cfg.agent) + "-s" + std::to_string(seed);
}

// Fills in the preset-dependent defaults: the exploration horizon tracks
// the planned number of training steps (up to the 5000-step default), and
// deeper networks back the large chains.
inline void resolve_defaults(RunConfig& cfg) {
    const std::int64_t total =
        static_cast<std::int64_t>(cfg.episodes) * static_cast<std::int64_t>(cfg.iterations);
    if (!cfg.schedule_overridden) {
        const std::int64_t horizon = std::min<std::int64_t>(5000, total);
        cfg.agent_cfg.schedule =
            agents::ExplorationSchedule::standard(0.1, 0.9, 0, std::max<std::int64_t>(horizon, 1));
    }
    if (cfg.preset == "cc100" || cfg.preset == "cc500") {
        if (cfg.agent_cfg.hidden_depth == 3) cfg.agent_cfg.hidden_depth = 5;
    }
    if (cfg.agent == "dql-per") cfg.agent_cfg.per_enabled = true;
    cfg.agent_cfg.kind = agent_label(cfg.agent);
}

inline ojson schedule_to_json(const agents::ExplorationSchedule& s) {
    ojson j;
    j["kind"] = s.kind_name();
    switch (s.kind) {
        case agents::ExplorationSchedule::Kind::EarlyExploitPiecewise:
        case agents::ExplorationSchedule::Kind::StandardPiecewise:
            j["eps_low"] = s.eps_low;
            j["eps_high"] = s.eps_high;
            j["t_switch"] = s.t_switch;
            j["t_total"] = s.t_total;
            break;
        case agents::ExplorationSchedule::Kind::AdditiveRamp:
            j["eps_start"] = s.eps_start;
            j["increment"] = s.increment;
            j["eps_cap"] = s.eps_cap;
            break;
        case agents::ExplorationSchedule::Kind::MultiplicativeDecay:
            j["eps_start"] = s.eps_start;
            j["factor"] = s.factor;
            j["eps_floor"] = s.eps_floor;
            break;
    }
    return j;
}

inline agents::ExplorationSchedule schedule_from_json(const ojson& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "early")
        return agents::ExplorationSchedule::early_exploit(j.at("eps_low"), j.at("eps_high"),
                                                          j.at("t_switch"), j.at("t_total"));
    if (kind == "standard")
        return agents::ExplorationSchedule::standard(j.at("eps_low"), j.at("eps_high"),
                                                     j.at("t_switch"), j.at("t_total"));
    if (kind == "additive")
        return agents::ExplorationSchedule::additive(j.at("eps_start"), j.at("increment"),
                                                     j.at("eps_cap"));
    if (kind == "multiplicative")
        return agents::ExplorationSchedule::multiplicative(j.at("eps_start"), j.at("factor"),
                                                           j.at("eps_floor"));
    throw InvalidArgument("unknown schedule kind: " + kind);
}

inline ojson config_to_json(const RunConfig& cfg, std::uint64_t seed) {
    ojson j;
    j["environment"] = env_label(cfg);
    j["preset"] = cfg.preset;
    j["topology_file"] = cfg.topology_file;
    j["chain_pairs"] = cfg.chain_pairs;
    j["env_seed"] = cfg.env_seed;
    j["agent"] = cfg.agent;
    j["episodes"] = cfg.episodes;
    j["iterations"] = cfg.iterations;
    j["seed"] = seed;
    ojson a;
    a["learning_rate"] = cfg.agent_cfg.learning_rate;
    a["gamma"] = cfg.agent_cfg.gamma;
    a["batch_size"] = cfg.agent_cfg.batch_size;
    a["buffer_capacity"] = cfg.agent_cfg.buffer_capacity;
    a["target_sync_every"] = cfg.agent_cfg.target_sync_every;
    a["per_enabled"] = cfg.agent_cfg.per_enabled;
    a["per_alpha"] = cfg.agent_cfg.per.alpha;
    a["per_beta"] = cfg.agent_cfg.per.beta;
    a["per_eps0"] = cfg.agent_cfg.per.eps0;
    a["hidden_width"] = cfg.agent_cfg.hidden_width;
    a["hidden_depth"] = cfg.agent_cfg.hidden_depth;
    a["optimizer"] = cfg.agent_cfg.optimizer;
    a["updates_per_step"] = cfg.agent_cfg.updates_per_step;
    a["huber_delta"] = cfg.agent_cfg.huber_delta;
    a["tabular_alpha"] = cfg.agent_cfg.tabular_alpha;
    a["clip"] = cfg.agent_cfg.clip;
    a["entropy_coef"] = cfg.agent_cfg.entropy_coef;
    a["pg_epochs"] = cfg.agent_cfg.pg_epochs;
    j["agent_config"] = std::move(a);
    j["schedule"] = schedule_to_json(cfg.agent_cfg.schedule);
    j["phase_threshold"] = cfg.phase_threshold;
    j["reward_filter"] = cfg.reward_filter;
    return j;
}

// ----- training --------------------------------------------------------

// Margin of the top two available actions, measured on log-probabilities
// (equal to the logit gap under a shared softmax normalizer).
inline std::optional<double> margin_from_probs(const agents::Vec& probs) {
    double top1 = 0.0, top2 = 0.0;
    for (double p : probs) {
        if (p > top1) {
            top2 = top1;
            top1 = p;
        } else if (p > top2) {
            top2 = p;
        }
    }
    if (top2 <= 0.0) return std::nullopt;
    return std::log(top1) - std::log(top2);
}

// Trains one seed and returns the run directory.
inline std::string train_run(RunConfig cfg, std::uint64_t seed) {
    resolve_defaults(cfg);
    const std::string id = run_id(cfg, seed);
    const fs::path dir = fs::path(cfg.out_dir) / id;
    fs::create_directories(dir);

    env::NetworkTopology topo = build_run_topology(cfg);
    env::save_topology(topo, (dir / "topology.json").string());
    env::EnvConfig env_cfg;
    env_cfg.step_cap = cfg.iterations;
    env::Environment environment(std::move(topo), env_cfg);
    const auto& t = environment.topology();

    const int n_actions = static_cast<int>(environment.ladder().size());
    const int input_dim = static_cast<int>(env::encoding_dim(t));

    std::unique_ptr<agents::Agent> agent;
    if (cfg.agent.rfind("exploit:", 0) == 0) {
        const std::string source_dir = cfg.agent.substr(std::string("exploit:").size());
        const auto pj = trace::load_manifest((fs::path(source_dir) / "params.json").string());
        agent = std::make_unique<agents::ExploitingAgent>(params_from_json(pj));
    } else {
        agent = agents::make_agent(cfg.agent_cfg, input_dim, n_actions, seed);
    }

    trace::TraceWriter writer((dir / "events.log").string(), id);
    int batch_counter = 0;
    int current_episode = 1;

    agents::Hooks hooks;
    hooks.on_step = [&](const agents::StepHookData& d) {
        writer.step(d.episode, d.t, *d.action, d.reward, d.ct, *d.newly_discovered, d.done);
    };
    hooks.on_batch = [&](const agents::BatchHookData& d) {
        const auto stat = explain::record_priority_stats(d.td_errors, d.rewards, d.state_keys,
                                                         cfg.reward_filter);
        writer.batch(current_episode, batch_counter++, stat.mean_abs_td,
                     stat.high_priority_count);
    };
    hooks.on_episode_end = [&](const agents::EpisodeSummary& s) {
        writer.episode_end(s.episode, s.steps, s.cumulative_reward, s.final_ct, s.discovered,
                           s.reached_flag);
    };

    const bool stochastic_policy = cfg.agent == "pg";
    for (int ep = 1; ep <= cfg.episodes; ++ep) {
        current_episode = ep;
        agents::EpisodeStates states;
        std::vector<agents::Vec> step_probs;
        agents::run_episode(*agent, environment, derive_seed(seed, "episode"), ep, hooks, &states,
                            stochastic_policy ? &step_probs : nullptr);

        if (!states.encodings.empty()) {
            std::vector<agents::Vec> rows;
            for (std::size_t i = 0; i < states.encodings.size(); ++i) {
                if (auto scores = agent->action_scores(states.encodings[i], states.keys[i]))
                    rows.push_back(*scores);
            }
            if (!rows.empty()) {
                const auto snap = explain::aggregate_action_values(rows, ep);
                writer.explain_snapshot(ep, snap.mean_values, snap.dominant + 1);
            }
        }
        if (!step_probs.empty()) {
            double entropy = 0.0, margin = 0.0;
            int margin_n = 0;
            for (const auto& p : step_probs) {
                entropy += explain::normalized_entropy(p) / static_cast<double>(step_probs.size());
                if (auto m = margin_from_probs(p)) {
                    margin += *m;
                    ++margin_n;
                }
            }
            writer.explain_confidence(ep, entropy, margin_n ? margin / margin_n : 0.0);
            writer.explain_dominant(ep, explain::dominant_action(step_probs) + 1);
        }
    }
    writer.close();

    // Final parameters, for the exploiting policy and audits.
    if (auto* dql = dynamic_cast<agents::DqlAgent*>(agent.get()))
        trace::save_manifest(params_to_json(dql->parameters()), (dir / "params.json").string());
    else if (auto* pg = dynamic_cast<agents::PgAgent*>(agent.get()))
        trace::save_manifest(params_to_json(pg->parameters()), (dir / "params.json").string());
    else if (auto* ex = dynamic_cast<agents::ExploitingAgent*>(agent.get()))
        trace::save_manifest(params_to_json(ex->parameters()), (dir / "params.json").string());

    ojson manifest;
    manifest["run_id"] = id;
    manifest["tool_version"] = std::string(kToolVersion);
    manifest["config"] = config_to_json(cfg, seed);
    manifest["encoding_dim"] = input_dim;
    manifest["actions"] = n_actions;
    manifest["env_size"] = t.size();
    manifest["env_max_nodes"] = t.max_nodes();
    manifest["events"] = writer.events_written();
    manifest["events_hash"] = trace::hash_file((dir / "events.log").string());
    trace::save_manifest(manifest, (dir / "manifest.json").string());

    if (cfg.export_signals) {
        const auto run_trace = trace::load_trace((dir / "events.log").string());
        fs::create_directories(dir / "signals");
        for (const auto& name : trace::signal_names()) {
            const auto csv = trace::export_signal(run_trace, name, cfg.phase_threshold);
            trace::save_csv(csv, (dir / "signals" / (name + ".csv")).string());
        }
        trace::save_csv(trace::export_epsilon(cfg.agent_cfg.schedule,
                                              std::max<std::int64_t>(
                                                  1, static_cast<std::int64_t>(cfg.episodes) *
                                                         cfg.iterations)),
                        (dir / "signals" / "epsilon.csv").string());
    }
    return dir.string();
}

// Trains every seed sequentially; returns the run directories.
inline std::vector<std::string> train_all(const RunConfig& cfg) {
    std::vector<std::string> dirs;
    for (std::uint64_t seed : cfg.seeds) dirs.push_back(train_run(cfg, seed));
    return dirs;
}

}  // namespace redtrace::train
