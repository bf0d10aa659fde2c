#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridsig/agents.hpp"
#include "gridsig/contexts.hpp"
#include "gridsig/env.hpp"
#include "gridsig/net.hpp"
#include "gridsig/sim.hpp"

namespace gridsig {

/// Invalid configuration; what() starts with the offending field path.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::invalid_argument(path + ": " + message), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class AgentMode { fixed, qlearn };

const char* to_string(AgentMode mode);
const char* to_string(InsertionMode mode);

struct GridConfig {
    int rows = 4;
    int cols = 4;
    double link_length = 150.0;
    int lanes = 2;

    bool operator==(const GridConfig&) const = default;
};

/// Context declared by route name, e.g. {"A2F2": 3, "B1B6": 6, ...}.
struct ContextSpec {
    std::string name;
    std::map<std::string, double> periods;

    bool operator==(const ContextSpec&) const = default;
};

struct ScenarioConfig {
    std::string label = "scenario";
    GridConfig grid;
    SimParams sim;
    std::vector<ContextSpec> contexts;
    std::int64_t switch_period = 20000;
    int start_context = 0;
    InsertionMode insertion = InsertionMode::bernoulli;

    AgentMode agent_mode = AgentMode::qlearn;
    ObservationMode observation = ObservationMode::full;
    int bins = 10;
    AgentConfig agent;
    FixedPolicyConfig fixed;
    int decision_interval = 5;
    std::optional<std::int64_t> freeze_at;

    std::int64_t horizon = 40000;
    int n_runs = 30;
    std::uint64_t base_seed = 1;
    std::string output_dir;
    bool save_qtables = false;

    /// Throws ConfigError on the first invalid field.
    void validate() const;

    GridNetwork build_network() const;
    ContextSchedule build_schedule(const GridNetwork& net) const;
};

bool operator==(const SimParams& a, const SimParams& b);
bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

nlohmann::ordered_json to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const nlohmann::json& j);

ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);

/// Balanced and WE-heavy contexts for a grid, keyed by route name.
std::vector<ContextSpec> default_context_specs(const GridConfig& grid);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

std::vector<std::string> preset_names();

/// Scenario list for a named experiment. Throws std::invalid_argument for
/// unknown names.
std::vector<ScenarioConfig> preset(const std::string& name);

}  // namespace gridsig
