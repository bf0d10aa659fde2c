#include <doctest.h>

#include <cmath>
#include <map>

#include "gridsig/config.hpp"
#include "gridsig/env.hpp"
#include "gridsig/runner.hpp"

using namespace gridsig;

namespace {

void place(SimState& state, const GridNetwork& net, int link_id, int lane, double pos, double speed) {
    const Link& l = net.link(link_id);
    Vehicle v;
    v.id = state.next_vehicle_id++;
    v.route = l.route;
    v.route_index = l.route_index;
    v.lane = lane;
    v.pos = pos;
    v.speed = speed;
    state.lanes[static_cast<std::size_t>(link_id)][static_cast<std::size_t>(lane)].push_back(v);
    ++state.inserted;
}

ScenarioConfig short_learning_run(ObservationMode mode) {
    ScenarioConfig cfg;
    cfg.label = "short";
    cfg.observation = mode;
    cfg.horizon = 3000;
    cfg.switch_period = 1000;
    cfg.n_runs = 1;
    cfg.contexts = default_context_specs(cfg.grid);
    return cfg;
}

}  // namespace

TEST_SUITE("env") {

TEST_CASE("empty intersection observation") {
    GridNetwork net = build_grid(4, 4, 150, 2);
    SimState s = make_initial_state(net, 1);
    Observation full = observe(s, net, 0, ObservationMode::full);
    CHECK(full.values() == std::vector<double>{0, 0, 0, 0, 0, 0});
    Observation part = observe(s, net, 0, ObservationMode::partial);
    CHECK(part.values() == std::vector<double>{0, 0, 0, 0});
    CHECK(part.density.empty());
}

TEST_CASE("density and queue are count ratios over phase capacity") {
    GridNetwork net = build_grid(4, 4, 150, 2);
    SimState s = make_initial_state(net, 1);
    const int ns_in = net.intersections()[0].incoming[static_cast<std::size_t>(Axis::NS)];
    // 10 vehicles on the N-S approach, 4 of them stopped.
    for (int i = 0; i < 10; ++i) {
        place(s, net, ns_in, i % 2, 145.0 - 10.0 * (i / 2), i < 4 ? 0.0 : 3.0);
    }
    s.signals[0].elapsed = 12;
    Observation full = observe(s, net, 0, ObservationMode::full);
    CHECK(full.density[0] == doctest::Approx(0.25));
    CHECK(full.queue[0] == doctest::Approx(0.10));
    CHECK(full.density[1] == 0.0);
    CHECK(full.values() == std::vector<double>{0, 12, 0.25, 0.1, 0, 0});

    Observation part = observe(s, net, 0, ObservationMode::partial);
    CHECK(part.values() == std::vector<double>{0, 12, 0.1, 0});
}

TEST_CASE("yellow reads as zero elapsed green of the next phase") {
    GridNetwork net = build_grid(4, 4, 150, 2);
    SimState s = make_initial_state(net, 1);
    s.signals[0].elapsed = 30;
    s.signals[0] = apply_signal_command(s.signals[0], SignalCommand::change);
    Observation o = observe(s, net, 0, ObservationMode::full);
    CHECK(o.phase == 1);
    CHECK(o.elapsed == 0);
    ActionMask m = action_mask(s.signals[0]);
    CHECK(m.keep_allowed);
    CHECK_FALSE(m.change_allowed);
}

TEST_CASE("attribute and elapsed bins") {
    CHECK(attribute_bin(0.35, 10) == 3);
    CHECK(attribute_bin(1.0, 10) == 9);
    CHECK(attribute_bin(0.35, 4) == 1);
    CHECK(attribute_bin(0.0, 4) == 0);
    CHECK(attribute_bin(0.999, 4) == 3);
    CHECK_THROWS(attribute_bin(0.5, 0));
    CHECK(elapsed_bin(0) == 0);
    CHECK(elapsed_bin(4) == 0);
    CHECK(elapsed_bin(5) == 1);
    CHECK(elapsed_bin(49) == 9);
    CHECK(elapsed_bin(50) == 10);
    CHECK(elapsed_bin(120) == 10);
}

TEST_CASE("discretize is monotone and total on the unit interval") {
    for (int bins : {1, 2, 4, 10, 17}) {
        int prev = 0;
        for (int i = 0; i <= 10000; ++i) {
            double v = i / 10000.0;
            int b = attribute_bin(v, bins);
            REQUIRE(b >= 0);
            REQUIRE(b < bins);
            REQUIRE(b >= prev);
            prev = b;
        }
        CHECK(prev == bins - 1);
    }
    Observation o;
    o.mode = ObservationMode::full;
    o.phase = 1;
    o.elapsed = 23;
    o.density = {0.35, 1.0};
    o.queue = {0.1, 0.95};
    CHECK(discretize(o, 10).fields() == std::vector<int>{1, 4, 3, 1, 9, 9});
    CHECK(discretize(o, 4).fields() == std::vector<int>{1, 4, 1, 0, 3, 3});
    o.mode = ObservationMode::partial;
    o.density.clear();
    CHECK(discretize(o, 10).fields() == std::vector<int>{1, 4, 1, 9});
}

TEST_CASE("state keys pack and round-trip") {
    DiscretizedState k({1, 10, 3, 0, 9, 9});
    CHECK(k.code() == 0x010A03000909ULL);
    CHECK(DiscretizedState::from_code(k.code(), 6) == k);
    CHECK(k.to_string() == "1,10,3,0,9,9");
    CHECK(DiscretizedState({0, 1}) < DiscretizedState({1, 0}));
    CHECK_THROWS(DiscretizedState({256}));
    CHECK_THROWS(DiscretizedState({-1}));
    CHECK_THROWS(DiscretizedState({0, 0, 0, 0, 0, 0, 0, 0}));
}

TEST_CASE("action mask") {
    ActionMask a = action_mask(5);
    CHECK(a.keep_allowed);
    CHECK_FALSE(a.change_allowed);
    ActionMask b = action_mask(50);
    CHECK_FALSE(b.keep_allowed);
    CHECK(b.change_allowed);
    ActionMask c = action_mask(30);
    CHECK(c.keep_allowed);
    CHECK(c.change_allowed);
    CHECK(action_mask(9).change_allowed == false);
    CHECK(action_mask(10).change_allowed == true);
    CHECK(action_mask(49).keep_allowed == true);
    for (int d = 0; d <= 200; ++d) {
        ActionMask m = action_mask(d);
        CHECK((m.keep_allowed || m.change_allowed));
    }
    CHECK_THROWS(action_mask(-1));
}

TEST_CASE("reward") {
    CHECK(reward(100, 80) == 20);
    CHECK(reward(0, 0) == 0);
    for (double x : {0.0, 3.0, 1e6}) {
        CHECK(reward(x, x) == 0.0);
        CHECK(reward(x, 7.0) == -reward(7.0, x));
    }
}

TEST_CASE("rewards telescope and queues never exceed density on a logged run") {
    for (ObservationMode mode : {ObservationMode::full, ObservationMode::partial}) {
        ScenarioConfig cfg = short_learning_run(mode);
        GridNetwork net = cfg.build_network();
        std::map<int, std::int64_t> first, last;
        std::map<int, double> sum;
        std::size_t decisions = 0;
        RunHooks hooks;
        hooks.on_decision = [&](const DecisionEvent& e) {
            ++decisions;
            if (!first.count(e.agent)) {
                first[e.agent] = e.waiting;
                CHECK_FALSE(e.reward.has_value());
            } else {
                REQUIRE(e.reward.has_value());
                sum[e.agent] += *e.reward;
            }
            last[e.agent] = e.waiting;
        };
        hooks.on_step = [&](const SimState& before, const SimState&) {
            if (before.clock % 5 != 0) {
                return;
            }
            for (std::size_t i = 0; i < net.intersections().size(); ++i) {
                Observation o = observe(before, net, static_cast<int>(i), ObservationMode::full);
                for (std::size_t p = 0; p < 2; ++p) {
                    REQUIRE(o.queue[p] <= o.density[p]);
                    REQUIRE(o.density[p] <= 1.0);
                    REQUIRE(o.queue[p] >= 0.0);
                }
            }
        };
        simulate_run(cfg, 3, hooks);
        CHECK(decisions == 16 * 600);
        for (const auto& [agent, w0] : first) {
            CAPTURE(agent);
            // Integer waits keep the sum exact.
            CHECK(sum[agent] == static_cast<double>(w0 - last[agent]));
        }
    }
}

}  // TEST_SUITE
