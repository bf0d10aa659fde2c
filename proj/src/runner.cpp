#include "gridsig/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "gridsig/contexts.hpp"
#include "gridsig/rng.hpp"

namespace gridsig {

const char* const kVersion = "0.3.0";

namespace {

struct PendingExperience {
    DiscretizedState state;
    SignalCommand action = SignalCommand::keep;
    std::int64_t waiting = 0;
};

}  // namespace

RunResult simulate_run(const ScenarioConfig& cfg, std::uint64_t seed, const RunHooks& hooks) {
    const GridNetwork net = cfg.build_network();
    const ContextSchedule schedule = cfg.build_schedule(net);
    const std::size_t n_agents = net.intersections().size();

    SimState state = make_initial_state(net, stream_seed(seed, kInsertionStream));

    std::vector<QLearningAgent> agents;
    std::vector<std::optional<PendingExperience>> pending(n_agents);
    if (cfg.agent_mode == AgentMode::qlearn) {
        agents.reserve(n_agents);
        for (std::size_t i = 0; i < n_agents; ++i) {
            agents.emplace_back(cfg.agent, stream_seed(seed, kAgentStreamBase + i));
        }
    }

    RunResult result;
    result.seed = seed;
    result.rows.reserve(static_cast<std::size_t>(cfg.horizon));

    std::vector<int> requests;
    SimState before;
    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
        if (cfg.freeze_at && t == *cfg.freeze_at) {
            for (QLearningAgent& agent : agents) {
                agent.freeze();
            }
        }

        if (t % cfg.decision_interval == 0) {
            for (std::size_t i = 0; i < n_agents; ++i) {
                const int inter = static_cast<int>(i);
                SignalState& sig = state.signals[i];
                SignalCommand cmd = SignalCommand::keep;
                if (cfg.agent_mode == AgentMode::fixed) {
                    cmd = fixed_policy_decide(sig, cfg.fixed);
                } else {
                    QLearningAgent& agent = agents[i];
                    std::int64_t waiting = intersection_waiting_time(state, net, inter);
                    DiscretizedState s = discretize(observe(state, net, inter, cfg.observation, cfg.sim), cfg.bins);
                    std::optional<double> r;
                    if (pending[i]) {
                        r = reward(static_cast<double>(pending[i]->waiting), static_cast<double>(waiting));
                        agent.learn(pending[i]->state, pending[i]->action, *r, s);
                    }
                    ActionMask mask = action_mask(sig);
                    cmd = agent.act(s, mask);
                    if (hooks.on_decision) {
                        hooks.on_decision(DecisionEvent{t, inter, waiting, r, s, cmd, mask});
                    }
                    pending[i] = PendingExperience{std::move(s), cmd, waiting};
                }
                sig = apply_signal_command(sig, cmd, cfg.sim.yellow_time);
            }
            if (!agents.empty()) {
                // Agent 0 stands in for all: every agent shares one schedule.
                result.agent_params.push_back(AgentParamRow{t, agents[0].epsilon(), agents[0].alpha()});
            }
        }

        int ctx = active_context_index(schedule, t);
        requests = insertion_requests(schedule.contexts[static_cast<std::size_t>(ctx)], t, state.rng, cfg.insertion);
        if (hooks.on_step) {
            before = state;
        }
        step(state, net, cfg.sim, requests);
        if (hooks.on_step) {
            hooks.on_step(before, state);
        }
        result.rows.push_back(RunRow{t, total_waiting(state, net), state.backlog_count(), ctx});
    }

    for (const QLearningAgent& agent : agents) {
        result.tables.push_back(agent.table());
        result.reached_states.push_back(agent.table().size());
    }
    return result;
}

std::vector<TimeSeries> ExperimentResult::waiting_series() const {
    std::vector<TimeSeries> out;
    for (const RunResult& run : runs) {
        TimeSeries ts;
        ts.label = config.label;
        ts.run_seed = run.seed;
        ts.values.reserve(run.rows.size());
        for (const RunRow& row : run.rows) {
            ts.values.push_back(static_cast<double>(row.total_waiting));
        }
        out.push_back(std::move(ts));
    }
    return out;
}

ExperimentResult run_experiment(const ScenarioConfig& cfg, unsigned jobs) {
    cfg.validate();
    ExperimentResult result;
    result.config = cfg;
    result.runs.resize(static_cast<std::size_t>(cfg.n_runs));

    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cfg.n_runs));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < cfg.n_runs; i = next++) {
            try {
                result.runs[static_cast<std::size_t>(i)] = simulate_run(cfg, cfg.base_seed + static_cast<std::uint64_t>(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    auto series = result.waiting_series();
    result.aggregate = aggregate_runs(series);
    return result;
}

std::string run_file_stem(std::uint64_t seed) {
    return "run_" + std::to_string(seed);
}

std::string provenance(const ScenarioConfig& cfg) {
    return std::string("gridsig ") + kVersion + " config:" + config_hash(cfg);
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

}  // namespace

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    }

    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const RunResult& run : result.runs) {
        const std::string stem = run_file_stem(run.seed);
        {
            auto out = open_for_write(dir / (stem + ".csv"));
            write_run_csv(out, run.rows);
        }
        nlohmann::ordered_json entry = {{"seed", run.seed}, {"csv", stem + ".csv"}};
        if (!run.agent_params.empty()) {
            auto out = open_for_write(dir / (stem + "_agents.csv"));
            out << kAgentCsvHeader << '\n';
            for (const AgentParamRow& row : run.agent_params) {
                out << row.step << ',' << format_number(row.epsilon) << ',' << format_number(row.alpha) << '\n';
            }
            entry["agents_csv"] = stem + "_agents.csv";
            entry["reached_states"] = run.reached_states;
        }
        if (result.config.save_qtables && !run.tables.empty()) {
            const auto qdir = dir / (stem + "_qtables");
            std::filesystem::create_directories(qdir);
            for (std::size_t a = 0; a < run.tables.size(); ++a) {
                auto out = open_for_write(qdir / ("agent_" + std::to_string(a) + ".txt"));
                run.tables[a].write(out);
            }
            entry["qtables"] = stem + "_qtables";
        }
        runs.push_back(std::move(entry));
    }
    {
        auto out = open_for_write(dir / "aggregate.csv");
        write_aggregate_csv(out, result.aggregate);
    }
    save_config(result.config, (dir / "config.json").string());

    nlohmann::ordered_json manifest;
    manifest["label"] = result.config.label;
    manifest["config_hash"] = config_hash(result.config);
    manifest["provenance"] = provenance(result.config);
    manifest["seeds"] = {result.config.base_seed, result.config.base_seed + result.config.n_runs - 1};
    manifest["seed_rule"] = "run i uses base_seed + i; stream k seeded with splitmix64(run_seed * 1024 + k), "
                            "k = 0 insertion, k = 1 + agent index exploration";
    manifest["runs"] = runs;
    manifest["config"] = to_json(result.config);
    auto out = open_for_write(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

}  // namespace gridsig
