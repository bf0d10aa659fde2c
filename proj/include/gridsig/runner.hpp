#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridsig/agents.hpp"
#include "gridsig/config.hpp"
#include "gridsig/env.hpp"
#include "gridsig/metrics.hpp"
#include "gridsig/sim.hpp"

namespace gridsig {

/// One learning decision, reported before the command is applied.
struct DecisionEvent {
    std::int64_t clock = 0;
    int agent = 0;
    std::int64_t waiting = 0;       // W at this decision tick
    std::optional<double> reward;   // for the previous action, absent on the first decision
    DiscretizedState state;
    SignalCommand action = SignalCommand::keep;
    ActionMask mask;
};

struct AgentParamRow {
    std::int64_t step = 0;
    double epsilon = 0.0;
    double alpha = 0.0;
};

inline constexpr const char* kAgentCsvHeader = "step,epsilon,alpha";

struct RunHooks {
    std::function<void(const DecisionEvent&)> on_decision;
    /// Called with the state before and after every simulated second.
    std::function<void(const SimState& before, const SimState& after)> on_step;
};

struct RunResult {
    std::uint64_t seed = 0;
    std::vector<RunRow> rows;
    std::vector<AgentParamRow> agent_params;  // decision ticks, agent 0
    std::vector<QTable> tables;               // final tables, one per intersection
    std::vector<std::size_t> reached_states;  // distinct keys per agent
};

RunResult simulate_run(const ScenarioConfig& cfg, std::uint64_t seed, const RunHooks& hooks = {});

struct ExperimentResult {
    ScenarioConfig config;
    std::vector<RunResult> runs;
    RunAggregate aggregate;

    std::vector<TimeSeries> waiting_series() const;
};

/// Runs seeds base_seed .. base_seed + n_runs - 1, up to jobs at a time.
/// jobs = 0 picks the hardware concurrency.
ExperimentResult run_experiment(const ScenarioConfig& cfg, unsigned jobs = 0);

std::string run_file_stem(std::uint64_t seed);

/// Writes run_<seed>.csv, run_<seed>_agents.csv (learning agents),
/// aggregate.csv, config.json and manifest.json into dir.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

/// "gridsig <version> config:<hash>".
std::string provenance(const ScenarioConfig& cfg);

extern const char* const kVersion;

}  // namespace gridsig
