#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gridsig/config.hpp"

using namespace gridsig;
using nlohmann::json;

namespace {

std::string error_path(const json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<none>";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("preset parameterizations") {
    auto fixed = preset("fixed-baseline");
    REQUIRE(fixed.size() == 1);
    CHECK(fixed[0].agent_mode == AgentMode::fixed);
    CHECK(fixed[0].horizon == 40000);
    CHECK(fixed[0].switch_period == 20000);
    CHECK(fixed[0].n_runs == 1);
    CHECK(fixed[0].fixed.green_time == 35);
    CHECK(fixed[0].fixed.yellow_time == 2);

    auto freeze = preset("freeze");
    REQUIRE(freeze.size() == 1);
    CHECK(freeze[0].agent_mode == AgentMode::qlearn);
    CHECK(freeze[0].agent.epsilon == EpsilonSchedule::decaying(1.0, 0.9985, 0.0));
    CHECK(freeze[0].freeze_at == 20000);
    CHECK(freeze[0].agent.alpha == 0.1);
    CHECK(freeze[0].agent.gamma == 0.99);
    CHECK(freeze[0].n_runs == 30);

    auto obs = preset("observability");
    REQUIRE(obs.size() == 2);
    CHECK(obs[0].observation == ObservationMode::full);
    CHECK(obs[1].observation == ObservationMode::partial);
    for (const ScenarioConfig& c : obs) {
        CHECK(c.agent.epsilon == EpsilonSchedule::fixed(0.05));
        CHECK(c.bins == 10);
        CHECK(c.horizon == 80000);
        CHECK_FALSE(c.freeze_at.has_value());
        CHECK(c.decision_interval == 5);
    }

    auto disc = preset("discretization");
    REQUIRE(disc.size() == 2);
    CHECK(disc[0].bins == 10);
    CHECK(disc[1].bins == 4);
    ScenarioConfig a = disc[0];
    ScenarioConfig b = disc[1];
    b.bins = a.bins;
    b.label = a.label;
    CHECK(a == b);  // only bins (and the label) differ
    CHECK(a.observation == ObservationMode::partial);
    CHECK(a.agent.epsilon == EpsilonSchedule::fixed(0.05));

    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
    CHECK(preset_names().size() == 4);
}

TEST_CASE("preset contexts keep equal total insertion rates") {
    for (const std::string& name : preset_names()) {
        for (const ScenarioConfig& cfg : preset(name)) {
            GridNetwork net = cfg.build_network();
            ContextSchedule s = cfg.build_schedule(net);
            REQUIRE(s.contexts.size() == 2);
            CHECK(exact_total_rate(s.contexts[0]) == Rational(8, 3));
            CHECK(exact_total_rate(s.contexts[1]) == Rational(8, 3));
        }
    }
}

TEST_CASE("every preset round-trips through JSON") {
    for (const std::string& name : preset_names()) {
        for (const ScenarioConfig& cfg : preset(name)) {
            CAPTURE(cfg.label);
            json j = json::parse(to_json(cfg).dump());
            ScenarioConfig back = config_from_json(j);
            CHECK(back == cfg);
            CHECK(config_hash(back) == config_hash(cfg));
        }
    }
}

TEST_CASE("config files round-trip") {
    auto dir = std::filesystem::temp_directory_path() / "gridsig_config_test";
    std::filesystem::create_directories(dir);
    ScenarioConfig cfg = preset("freeze").front();
    cfg.base_seed = 17;
    cfg.output_dir = "somewhere";
    save_config(cfg, (dir / "c.json").string());
    CHECK(load_config((dir / "c.json").string()) == cfg);

    std::ofstream(dir / "broken.json") << "{ \"label\": ";
    CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ConfigError);
    CHECK_THROWS(load_config((dir / "missing.json").string()));
    std::filesystem::remove_all(dir);
}

TEST_CASE("minimal file takes defaults") {
    ScenarioConfig cfg = config_from_json(json::parse(R"({"label": "mini", "horizon": 100})"));
    CHECK(cfg.label == "mini");
    CHECK(cfg.horizon == 100);
    CHECK(cfg.grid.rows == 4);
    CHECK(cfg.contexts.size() == 2);
    CHECK(cfg.agent.alpha == 0.1);
    CHECK(cfg.bins == 10);
}

TEST_CASE("errors name the offending field") {
    CHECK(error_path(json::parse(R"({"grid": {"rows": 0}})")) == "grid.rows");
    CHECK(error_path(json::parse(R"({"grid": {"rows": "four"}})")) == "grid.rows");
    CHECK(error_path(json::parse(R"({"grid": {"colz": 3}})")) == "grid.colz");
    CHECK(error_path(json::parse(R"({"sim": {"decel": -1}})")) == "sim.decel");
    CHECK(error_path(json::parse(R"({"horizon": 0})")) == "horizon");
    CHECK(error_path(json::parse(R"({"n_runs": 0})")) == "n_runs");
    CHECK(error_path(json::parse(R"({"bins": 0})")) == "bins");
    CHECK(error_path(json::parse(R"({"observation": "psychic"})")) == "observation");
    CHECK(error_path(json::parse(R"({"agent": {"epsilon": {"kind": "linear"}}})")) == "agent.epsilon.kind");
    CHECK(error_path(json::parse(R"({"agent": {"alpha": 2}})")) == "agent");
    CHECK(error_path(json::parse(R"({"freeze_at": "soon"})")) == "freeze_at");
    CHECK(error_path(json::parse(R"({"surprise": 1})")) == "surprise");
    CHECK(error_path(json::parse(R"({"base_seed": -3})")) == "base_seed");
    CHECK(error_path(json::parse(R"({"start_context": 5})")) == "start_context");
    CHECK(error_path(json::parse(R"([1, 2])")) == "<root>");

    json missing = json::parse(R"({"contexts": [{"name": "c", "flows": {"A2F2": 3}}]})");
    CHECK(error_path(missing) == "contexts[0].flows.A3F3");
    json unknown = json::parse(R"({"contexts": [{"name": "c", "flows": {"Z9Z9": 3}}]})");
    CHECK(error_path(unknown) == "contexts[0].flows.Z9Z9");
    json bad_period = to_json(preset("freeze").front());
    bad_period["contexts"][1]["flows"]["B1B6"] = -6;
    CHECK(error_path(json::parse(bad_period.dump())) == "contexts[1].flows.B1B6");
}

TEST_CASE("config hash is stable and sensitive") {
    ScenarioConfig a = preset("freeze").front();
    ScenarioConfig b = a;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.base_seed = 2;
    CHECK(config_hash(a) != config_hash(b));
}

}  // TEST_SUITE
