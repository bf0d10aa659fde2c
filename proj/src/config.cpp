#include "gridsig/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gridsig {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(AgentMode mode) {
    return mode == AgentMode::fixed ? "fixed" : "qlearn";
}

const char* to_string(InsertionMode mode) {
    return mode == InsertionMode::bernoulli ? "bernoulli" : "deterministic";
}

bool operator==(const SimParams& a, const SimParams& b) {
    return a.vmax == b.vmax && a.accel == b.accel && a.decel == b.decel && a.vehicle_length == b.vehicle_length &&
           a.min_gap == b.min_gap && a.stop_speed_threshold == b.stop_speed_threshold &&
           a.yellow_time == b.yellow_time && a.tau == b.tau;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.label == b.label && a.grid == b.grid && a.sim == b.sim && a.contexts == b.contexts &&
           a.switch_period == b.switch_period && a.start_context == b.start_context && a.insertion == b.insertion &&
           a.agent_mode == b.agent_mode && a.observation == b.observation && a.bins == b.bins &&
           a.agent == b.agent && a.fixed == b.fixed && a.decision_interval == b.decision_interval &&
           a.freeze_at == b.freeze_at && a.horizon == b.horizon && a.n_runs == b.n_runs &&
           a.base_seed == b.base_seed && a.output_dir == b.output_dir && a.save_qtables == b.save_qtables;
}

namespace {

void validate_grid(const GridConfig& grid) {
    if (grid.rows < 1) {
        throw ConfigError("grid.rows", "must be >= 1");
    }
    if (grid.cols < 1) {
        throw ConfigError("grid.cols", "must be >= 1");
    }
    if (!(grid.link_length > 0.0)) {
        throw ConfigError("grid.link_length", "must be positive");
    }
    if (grid.lanes < 1) {
        throw ConfigError("grid.lanes", "must be >= 1");
    }
}

}  // namespace

void ScenarioConfig::validate() const {
    if (label.empty()) {
        throw ConfigError("label", "must not be empty");
    }
    validate_grid(grid);
    try {
        sim.validate();
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        auto space = msg.find(' ');
        throw ConfigError("sim." + msg.substr(0, space), msg.substr(space + 1));
    }
    if (sim.vmax >= grid.link_length) {
        throw ConfigError("sim.vmax", "must be below grid.link_length");
    }
    if (contexts.empty()) {
        throw ConfigError("contexts", "at least one context is required");
    }
    if (switch_period <= 0) {
        throw ConfigError("switch_period", "must be positive");
    }
    if (start_context < 0 || static_cast<std::size_t>(start_context) >= contexts.size()) {
        throw ConfigError("start_context", "out of range");
    }
    if (bins < 1 || bins > 255) {
        throw ConfigError("bins", "must lie in [1, 255]");
    }
    if (decision_interval < 1) {
        throw ConfigError("decision_interval", "must be >= 1");
    }
    try {
        agent.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("agent", e.what());
    }
    try {
        fixed.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("fixed", e.what());
    }
    if (fixed.green_time >= kMaxGreen + 1) {
        throw ConfigError("fixed.green_time", "must not exceed max green");
    }
    if (fixed.yellow_time != sim.yellow_time) {
        throw ConfigError("fixed.yellow_time", "must equal sim.yellow_time");
    }
    if (freeze_at && *freeze_at < 0) {
        throw ConfigError("freeze_at", "must be non-negative");
    }
    if (horizon <= 0) {
        throw ConfigError("horizon", "must be positive");
    }
    if (n_runs < 1) {
        throw ConfigError("n_runs", "must be >= 1");
    }

    GridNetwork net = build_network();
    for (std::size_t c = 0; c < contexts.size(); ++c) {
        const std::string base = "contexts[" + std::to_string(c) + "]";
        const ContextSpec& spec = contexts[c];
        if (spec.name.empty()) {
            throw ConfigError(base + ".name", "must not be empty");
        }
        for (const auto& [route, period] : spec.periods) {
            if (net.find_route(route) < 0) {
                throw ConfigError(base + ".flows." + route, "unknown route");
            }
            if (!(period > 0.0) || !std::isfinite(period)) {
                throw ConfigError(base + ".flows." + route, "period must be positive");
            }
        }
        for (const Route& r : net.routes()) {
            if (!spec.periods.contains(r.name)) {
                throw ConfigError(base + ".flows." + r.name, "missing");
            }
        }
    }
}

GridNetwork ScenarioConfig::build_network() const {
    return build_grid(grid.rows, grid.cols, grid.link_length, grid.lanes);
}

ContextSchedule ScenarioConfig::build_schedule(const GridNetwork& net) const {
    ContextSchedule schedule;
    schedule.switch_period = switch_period;
    schedule.start_index = start_context;
    for (const ContextSpec& spec : contexts) {
        Context ctx;
        ctx.name = spec.name;
        for (std::size_t r = 0; r < net.routes().size(); ++r) {
            ctx.flows.push_back(ODFlow{static_cast<int>(r), spec.periods.at(net.routes()[r].name)});
        }
        schedule.contexts.push_back(std::move(ctx));
    }
    schedule.validate(net);
    return schedule;
}

std::vector<ContextSpec> default_context_specs(const GridConfig& grid) {
    GridNetwork net = build_grid(grid.rows, grid.cols, grid.link_length, grid.lanes);
    ContextSchedule schedule = default_schedule(net);
    std::vector<ContextSpec> specs;
    for (const Context& ctx : schedule.contexts) {
        ContextSpec spec;
        spec.name = ctx.name;
        for (const ODFlow& flow : ctx.flows) {
            spec.periods[net.route(flow.route).name] = flow.period;
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

ordered_json to_json(const ScenarioConfig& cfg) {
    ordered_json j;
    j["label"] = cfg.label;
    j["grid"] = {{"rows", cfg.grid.rows},
                 {"cols", cfg.grid.cols},
                 {"link_length", cfg.grid.link_length},
                 {"lanes", cfg.grid.lanes}};
    j["sim"] = {{"vmax", cfg.sim.vmax},
                {"accel", cfg.sim.accel},
                {"decel", cfg.sim.decel},
                {"vehicle_length", cfg.sim.vehicle_length},
                {"min_gap", cfg.sim.min_gap},
                {"stop_speed_threshold", cfg.sim.stop_speed_threshold},
                {"yellow_time", cfg.sim.yellow_time},
                {"tau", cfg.sim.tau}};
    ordered_json contexts = ordered_json::array();
    for (const ContextSpec& spec : cfg.contexts) {
        ordered_json flows = ordered_json::object();
        for (const auto& [route, period] : spec.periods) {
            flows[route] = period;
        }
        contexts.push_back({{"name", spec.name}, {"flows", flows}});
    }
    j["contexts"] = contexts;
    j["switch_period"] = cfg.switch_period;
    j["start_context"] = cfg.start_context;
    j["insertion"] = to_string(cfg.insertion);
    j["agent_mode"] = to_string(cfg.agent_mode);
    j["observation"] = to_string(cfg.observation);
    j["bins"] = cfg.bins;
    j["agent"] = {{"alpha", cfg.agent.alpha},
                  {"gamma", cfg.agent.gamma},
                  {"epsilon",
                   {{"kind", to_string(cfg.agent.epsilon.kind)},
                    {"start", cfg.agent.epsilon.start},
                    {"factor", cfg.agent.epsilon.factor},
                    {"floor", cfg.agent.epsilon.floor}}},
                  {"frozen", cfg.agent.frozen}};
    j["fixed"] = {{"green_time", cfg.fixed.green_time}, {"yellow_time", cfg.fixed.yellow_time}};
    j["decision_interval"] = cfg.decision_interval;
    j["freeze_at"] = cfg.freeze_at ? ordered_json(*cfg.freeze_at) : ordered_json(nullptr);
    j["horizon"] = cfg.horizon;
    j["n_runs"] = cfg.n_runs;
    j["base_seed"] = cfg.base_seed;
    j["output_dir"] = cfg.output_dir;
    j["save_qtables"] = cfg.save_qtables;
    return j;
}

namespace {

/// Walks one JSON object, tracking the field path and rejecting unknown keys.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        if (!j_.contains(key)) {
            return;
        }
        seen_.insert(key);
        const json& v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) {
                    throw ConfigError(child(key), "expected a boolean");
                }
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) {
                    throw ConfigError(child(key), "expected an integer");
                }
                if constexpr (std::is_unsigned_v<T>) {
                    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
                        throw ConfigError(child(key), "expected a non-negative integer");
                    }
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) {
                    throw ConfigError(child(key), "expected a number");
                }
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) {
                    throw ConfigError(child(key), "expected a string");
                }
            }
            out = v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(child(key), e.what());
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(child(key), "unknown field");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename Enum, typename Parse>
void get_enum(ObjectReader& r, const std::string& key, Enum& out, Parse parse) {
    std::string text;
    r.get(key, text);
    if (text.empty()) {
        return;
    }
    try {
        out = parse(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(r.child(key), e.what());
    }
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig cfg;
    ObjectReader root(j, "");
    root.get("label", cfg.label);
    if (root.has("grid")) {
        ObjectReader g(root.raw("grid"), "grid");
        g.get("rows", cfg.grid.rows);
        g.get("cols", cfg.grid.cols);
        g.get("link_length", cfg.grid.link_length);
        g.get("lanes", cfg.grid.lanes);
        g.finish();
    }
    if (root.has("sim")) {
        ObjectReader s(root.raw("sim"), "sim");
        s.get("vmax", cfg.sim.vmax);
        s.get("accel", cfg.sim.accel);
        s.get("decel", cfg.sim.decel);
        s.get("vehicle_length", cfg.sim.vehicle_length);
        s.get("min_gap", cfg.sim.min_gap);
        s.get("stop_speed_threshold", cfg.sim.stop_speed_threshold);
        s.get("yellow_time", cfg.sim.yellow_time);
        s.get("tau", cfg.sim.tau);
        s.finish();
    }
    if (root.has("contexts")) {
        const json& list = root.raw("contexts");
        if (!list.is_array()) {
            throw ConfigError("contexts", "expected an array");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            std::string base = "contexts[" + std::to_string(i) + "]";
            ObjectReader c(list[i], base);
            ContextSpec spec;
            c.get("name", spec.name);
            if (!c.has("flows")) {
                throw ConfigError(base + ".flows", "missing");
            }
            ObjectReader flows(c.raw("flows"), base + ".flows");
            for (const auto& [route, value] : list[i].at("flows").items()) {
                double period = 0.0;
                flows.get(route, period);
                spec.periods[route] = period;
            }
            flows.finish();
            c.finish();
            cfg.contexts.push_back(std::move(spec));
        }
    } else {
        validate_grid(cfg.grid);  // before deriving route names from it
        cfg.contexts = default_context_specs(cfg.grid);
    }
    root.get("switch_period", cfg.switch_period);
    root.get("start_context", cfg.start_context);
    get_enum(root, "insertion", cfg.insertion, [](const std::string& t) {
        if (t == "bernoulli") {
            return InsertionMode::bernoulli;
        }
        if (t == "deterministic") {
            return InsertionMode::deterministic;
        }
        throw std::invalid_argument("unknown insertion mode '" + t + "'");
    });
    get_enum(root, "agent_mode", cfg.agent_mode, [](const std::string& t) {
        if (t == "fixed") {
            return AgentMode::fixed;
        }
        if (t == "qlearn") {
            return AgentMode::qlearn;
        }
        throw std::invalid_argument("unknown agent mode '" + t + "'");
    });
    get_enum(root, "observation", cfg.observation, parse_observation_mode);
    root.get("bins", cfg.bins);
    if (root.has("agent")) {
        ObjectReader a(root.raw("agent"), "agent");
        a.get("alpha", cfg.agent.alpha);
        a.get("gamma", cfg.agent.gamma);
        a.get("frozen", cfg.agent.frozen);
        if (a.has("epsilon")) {
            ObjectReader e(a.raw("epsilon"), "agent.epsilon");
            get_enum(e, "kind", cfg.agent.epsilon.kind, parse_epsilon_kind);
            e.get("start", cfg.agent.epsilon.start);
            e.get("factor", cfg.agent.epsilon.factor);
            e.get("floor", cfg.agent.epsilon.floor);
            e.finish();
        }
        a.finish();
    }
    if (root.has("fixed")) {
        ObjectReader f(root.raw("fixed"), "fixed");
        f.get("green_time", cfg.fixed.green_time);
        f.get("yellow_time", cfg.fixed.yellow_time);
        f.finish();
    }
    root.get("decision_interval", cfg.decision_interval);
    if (root.has("freeze_at")) {
        const json& v = root.raw("freeze_at");
        if (v.is_null()) {
            cfg.freeze_at.reset();
        } else if (v.is_number_integer()) {
            cfg.freeze_at = v.get<std::int64_t>();
        } else {
            throw ConfigError("freeze_at", "expected an integer or null");
        }
    }
    root.get("horizon", cfg.horizon);
    root.get("n_runs", cfg.n_runs);
    root.get("base_seed", cfg.base_seed);
    root.get("output_dir", cfg.output_dir);
    root.get("save_qtables", cfg.save_qtables);
    root.finish();
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << to_json(cfg).dump(2) << '\n';
}

std::string config_hash(const ScenarioConfig& cfg) {
    std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> preset_names() {
    return {"fixed-baseline", "freeze", "observability", "discretization"};
}

namespace {

ScenarioConfig base_config() {
    ScenarioConfig cfg;
    cfg.contexts = default_context_specs(cfg.grid);
    cfg.switch_period = 20000;
    cfg.agent.alpha = 0.1;
    cfg.agent.gamma = 0.99;
    return cfg;
}

}  // namespace

std::vector<ScenarioConfig> preset(const std::string& name) {
    if (name == "fixed-baseline") {
        ScenarioConfig cfg = base_config();
        cfg.label = "fixed";
        cfg.agent_mode = AgentMode::fixed;
        cfg.decision_interval = 1;
        cfg.agent.epsilon = EpsilonSchedule::none();
        cfg.horizon = 40000;
        cfg.n_runs = 1;
        return {cfg};
    }
    if (name == "freeze") {
        ScenarioConfig cfg = base_config();
        cfg.label = "freeze";
        cfg.agent_mode = AgentMode::qlearn;
        cfg.observation = ObservationMode::full;
        cfg.agent.epsilon = EpsilonSchedule::decaying(1.0, 0.9985, 0.0);
        cfg.freeze_at = 20000;
        cfg.horizon = 40000;
        return {cfg};
    }
    if (name == "observability") {
        ScenarioConfig full = base_config();
        full.agent_mode = AgentMode::qlearn;
        full.agent.epsilon = EpsilonSchedule::fixed(0.05);
        full.horizon = 80000;
        full.bins = 10;
        ScenarioConfig partial = full;
        full.label = "full";
        full.observation = ObservationMode::full;
        partial.label = "partial";
        partial.observation = ObservationMode::partial;
        return {full, partial};
    }
    if (name == "discretization") {
        ScenarioConfig fine = base_config();
        fine.agent_mode = AgentMode::qlearn;
        fine.observation = ObservationMode::partial;
        fine.agent.epsilon = EpsilonSchedule::fixed(0.05);
        fine.horizon = 80000;
        ScenarioConfig coarse = fine;
        fine.label = "bins10";
        fine.bins = 10;
        coarse.label = "bins4";
        coarse.bins = 4;
        return {fine, coarse};
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace gridsig
