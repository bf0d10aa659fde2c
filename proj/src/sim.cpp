#include "gridsig/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gridsig {

void SimParams::validate() const {
    auto require_positive = [](double value, const char* field) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw std::invalid_argument(std::string(field) + " must be positive");
        }
    };
    require_positive(vmax, "vmax");
    require_positive(accel, "accel");
    require_positive(decel, "decel");
    require_positive(vehicle_length, "vehicle_length");
    require_positive(min_gap, "min_gap");
    require_positive(stop_speed_threshold, "stop_speed_threshold");
    require_positive(tau, "tau");
    if (yellow_time < 1) {
        throw std::invalid_argument("yellow_time must be positive");
    }
}

const char* to_string(SignalCommand cmd) {
    return cmd == SignalCommand::keep ? "keep" : "change";
}

SignalState apply_signal_command(SignalState sig, SignalCommand cmd, int yellow_time) {
    if (sig.in_yellow()) {
        if (cmd != SignalCommand::keep) {
            throw ContractViolation("change issued during yellow");
        }
        return sig;
    }
    if (cmd == SignalCommand::keep) {
        if (sig.elapsed >= kMaxGreen) {
            throw ContractViolation("keep issued at elapsed green " + std::to_string(sig.elapsed) +
                                    " >= max green");
        }
        return sig;
    }
    if (sig.elapsed < kMinGreen) {
        throw ContractViolation("change issued at elapsed green " + std::to_string(sig.elapsed) +
                                " < min green");
    }
    sig.yellow_remaining = yellow_time;
    sig.pending_phase = 1 - sig.green_phase;
    return sig;
}

void advance_signal(SignalState& sig) {
    if (sig.in_yellow()) {
        if (--sig.yellow_remaining == 0) {
            sig.green_phase = sig.pending_phase.value_or(sig.green_phase);
            sig.pending_phase.reset();
            sig.elapsed = 0;
        }
        return;
    }
    ++sig.elapsed;
}

Light light_for(const SignalState& sig, Axis axis) {
    if (sig.green_phase != static_cast<int>(axis)) {
        return Light::red;
    }
    return sig.in_yellow() ? Light::yellow : Light::green;
}

double safe_speed(double gap, double obstacle_speed, double decel, double tau) {
    if (gap <= 0.0) {
        return 0.0;
    }
    // Travel v for tau seconds, then brake at decel: v tau + v^2 / 2b <= gap + vl^2 / 2b.
    double tb = tau * decel;
    return std::max(0.0, -tb + std::sqrt(tb * tb + obstacle_speed * obstacle_speed + 2.0 * decel * gap));
}

SpeedUpdate car_following_update(const Vehicle& vehicle, std::optional<Obstacle> leader,
                                 std::optional<double> stop_line_gap, Light light,
                                 const SimParams& params) {
    double speed = std::min(vehicle.speed + params.accel, params.vmax);
    if (leader) {
        double gap = std::max(0.0, leader->gap);
        speed = std::min({speed, safe_speed(gap, leader->speed, params.decel, params.tau), gap});
    }
    if (light != Light::green && stop_line_gap) {
        double gap = std::max(0.0, *stop_line_gap);
        speed = std::min({speed, safe_speed(gap, 0.0, params.decel, params.tau), gap});
    }
    speed = std::max(0.0, speed);
    return SpeedUpdate{speed, vehicle.pos + speed};
}

std::int64_t SimState::active_count() const {
    std::int64_t n = 0;
    for (const auto& link : lanes) {
        for (const Lane& lane : link) {
            n += static_cast<std::int64_t>(lane.size());
        }
    }
    return n;
}

std::int64_t SimState::backlog_count() const {
    std::int64_t n = 0;
    for (const auto& q : backlog) {
        n += static_cast<std::int64_t>(q.size());
    }
    return n;
}

SimState make_initial_state(const GridNetwork& net, std::uint64_t insertion_seed) {
    SimState state;
    state.lanes.resize(net.links().size());
    for (const Link& link : net.links()) {
        state.lanes[static_cast<std::size_t>(link.id)].resize(static_cast<std::size_t>(link.lanes));
    }
    state.backlog.resize(net.routes().size());
    state.signals.resize(net.intersections().size());
    state.rng = Rng(insertion_seed);
    return state;
}

namespace {

struct FrameLeader {
    double pos = 0.0;  // front bumper in the follower's link coordinates
    double speed = 0.0;
};

/// Plans next-second speeds for one lane from the current (pre-move) state of
/// every vehicle. Returns the number of front vehicles that will leave the
/// link this second.
std::size_t plan_lane(SimState& state, const GridNetwork& net, const SimParams& params, const Link& link,
                      int next_link, Light light, int lane_index, std::vector<double>& speeds) {
    const Lane& lane = state.lanes[static_cast<std::size_t>(link.id)][static_cast<std::size_t>(lane_index)];
    speeds.assign(lane.size(), 0.0);
    const double length = link.length;
    const Lane* downstream = nullptr;
    std::size_t downstream_capacity = 0;
    if (next_link >= 0) {
        downstream = &state.lanes[static_cast<std::size_t>(next_link)][static_cast<std::size_t>(lane_index)];
        downstream_capacity = static_cast<std::size_t>(
            lane_capacity(net.link(next_link), params.vehicle_length, params.min_gap));
    }
    const bool exit_link = downstream == nullptr;

    std::optional<FrameLeader> leader;
    if (downstream && !downstream->empty()) {
        leader = FrameLeader{length + downstream->back().pos, downstream->back().speed};
    }
    std::size_t crossing = 0;
    for (std::size_t i = 0; i < lane.size(); ++i) {
        const Vehicle& v = lane[i];
        bool may_cross = exit_link || (light == Light::green && downstream->size() + crossing < downstream_capacity);
        std::optional<Obstacle> obstacle;
        if (leader) {
            obstacle = Obstacle{leader->pos - params.vehicle_length - params.min_gap - v.pos, leader->speed};
        }
        std::optional<double> stop_gap;
        if (!exit_link) {
            stop_gap = length - v.pos;
        }
        SpeedUpdate upd = car_following_update(v, obstacle, stop_gap, may_cross ? Light::green : Light::red, params);
        double speed = upd.speed;
        if (!may_cross) {
            speed = std::min(speed, std::max(0.0, length - v.pos));
        }
        speeds[i] = speed;
        double new_pos = v.pos + speed;
        if (new_pos > length || (exit_link && new_pos >= length)) {
            ++crossing;
        }
        leader = FrameLeader{v.pos, v.speed};
    }
    return crossing;
}

void move_lane(SimState& state, const GridNetwork& net, const Link& link, int next_link, int lane_index,
               const std::vector<double>& speeds, std::size_t crossing) {
    Lane& lane = state.lanes[static_cast<std::size_t>(link.id)][static_cast<std::size_t>(lane_index)];
    for (std::size_t i = 0; i < lane.size(); ++i) {
        lane[i].speed = speeds[i];
        lane[i].pos += speeds[i];
    }
    Lane* downstream = next_link >= 0
                           ? &state.lanes[static_cast<std::size_t>(next_link)][static_cast<std::size_t>(lane_index)]
                           : nullptr;
    for (std::size_t i = 0; i < crossing; ++i) {
        Vehicle v = lane.front();
        lane.pop_front();
        if (!downstream) {
            ++state.arrived;
            continue;
        }
        v.pos = std::min(v.pos - link.length, net.link(next_link).length);
        ++v.route_index;
        v.link_wait = 0;
        downstream->push_back(v);
    }
    for (Vehicle& v : lane) {
        v.pos = std::min(v.pos, link.length);
    }
}

void drain_backlog(SimState& state, const GridNetwork& net, const SimParams& params) {
    const double entry_clearance = params.vehicle_length + params.min_gap;
    for (std::size_t r = 0; r < state.backlog.size(); ++r) {
        auto& pending = state.backlog[r];
        if (pending.empty()) {
            continue;
        }
        const Route& route = net.route(static_cast<int>(r));
        auto& lanes = state.lanes[static_cast<std::size_t>(route.links.front())];
        while (!pending.empty()) {
            int chosen = -1;
            for (std::size_t l = 0; l < lanes.size(); ++l) {
                const Lane& lane = lanes[l];
                bool free = lane.empty() || lane.back().pos - params.vehicle_length >= entry_clearance;
                if (!free) {
                    continue;
                }
                if (chosen < 0 || lane.size() < lanes[static_cast<std::size_t>(chosen)].size()) {
                    chosen = static_cast<int>(l);
                }
            }
            if (chosen < 0) {
                break;
            }
            Vehicle v;
            v.id = pending.front().vehicle_id;
            v.route = static_cast<int>(r);
            v.route_index = 0;
            v.lane = chosen;
            v.pos = params.vehicle_length;
            v.speed = 0.0;
            v.insert_time = state.clock;
            lanes[static_cast<std::size_t>(chosen)].push_back(v);
            pending.pop_front();
        }
    }
}

}  // namespace

void step(SimState& state, const GridNetwork& net, const SimParams& params, std::span<const int> insertions) {
    // Plan every speed from the current state, then move downstream links
    // first so vehicles handed to the next link are not moved twice.
    std::vector<std::vector<std::vector<double>>> speeds(net.links().size());
    std::vector<std::vector<std::size_t>> crossing(net.links().size());
    for (const Link& link : net.links()) {
        int inter = net.controlling_intersection(link.id);
        Light light = inter >= 0 ? light_for(state.signals[static_cast<std::size_t>(inter)], link.axis) : Light::green;
        int next = net.next_link(link.id);
        auto id = static_cast<std::size_t>(link.id);
        speeds[id].resize(static_cast<std::size_t>(link.lanes));
        crossing[id].resize(static_cast<std::size_t>(link.lanes));
        for (int lane = 0; lane < link.lanes; ++lane) {
            crossing[id][static_cast<std::size_t>(lane)] =
                plan_lane(state, net, params, link, next, light, lane, speeds[id][static_cast<std::size_t>(lane)]);
        }
    }
    for (const Route& route : net.routes()) {
        for (auto it = route.links.rbegin(); it != route.links.rend(); ++it) {
            const Link& link = net.link(*it);
            auto id = static_cast<std::size_t>(link.id);
            for (int lane = 0; lane < link.lanes; ++lane) {
                move_lane(state, net, link, net.next_link(link.id), lane, speeds[id][static_cast<std::size_t>(lane)],
                          crossing[id][static_cast<std::size_t>(lane)]);
            }
        }
    }

    for (auto& link : state.lanes) {
        for (Lane& lane : link) {
            for (Vehicle& v : lane) {
                if (v.speed < params.stop_speed_threshold) {
                    ++v.link_wait;
                }
            }
        }
    }

    for (int route : insertions) {
        if (route < 0 || static_cast<std::size_t>(route) >= state.backlog.size()) {
            throw std::out_of_range("insertion request for unknown route " + std::to_string(route));
        }
        state.backlog[static_cast<std::size_t>(route)].push_back(PendingInsertion{state.next_vehicle_id++, state.clock});
        ++state.inserted;
    }
    drain_backlog(state, net, params);

    for (SignalState& sig : state.signals) {
        advance_signal(sig);
    }
    ++state.clock;
}

MovementCounts movement_counts(const SimState& state, const GridNetwork& net, int intersection, int phase,
                               const SimParams& params) {
    const Intersection& inter = net.intersections().at(static_cast<std::size_t>(intersection));
    const Phase& p = inter.phases.at(static_cast<std::size_t>(phase));
    MovementCounts counts;
    for (const Movement& m : p.movements) {
        for (const Vehicle& v : state.lanes[static_cast<std::size_t>(m.link)][static_cast<std::size_t>(m.lane)]) {
            ++counts.vehicles;
            if (v.speed < params.stop_speed_threshold) {
                ++counts.queued;
            }
        }
    }
    return counts;
}

std::int64_t intersection_waiting_time(const SimState& state, const GridNetwork& net, int intersection) {
    const Intersection& inter = net.intersections().at(static_cast<std::size_t>(intersection));
    std::int64_t total = 0;
    for (int link : inter.incoming) {
        for (const Lane& lane : state.lanes[static_cast<std::size_t>(link)]) {
            for (const Vehicle& v : lane) {
                total += v.link_wait;
            }
        }
    }
    return total;
}

std::vector<std::string> check_invariants(const SimState& state, const GridNetwork& net, const SimParams& params) {
    std::vector<std::string> out;
    auto report = [&](auto&&... parts) {
        std::ostringstream os;
        os << "t=" << state.clock << ": ";
        (os << ... << parts);
        out.push_back(os.str());
    };

    std::int64_t active = state.active_count();
    std::int64_t backlog = state.backlog_count();
    if (state.inserted != active + state.arrived + backlog) {
        report("conservation broken: inserted=", state.inserted, " active=", active, " arrived=", state.arrived,
               " backlog=", backlog);
    }

    constexpr double eps = 1e-9;
    for (const Link& link : net.links()) {
        const auto& lanes = state.lanes[static_cast<std::size_t>(link.id)];
        for (std::size_t l = 0; l < lanes.size(); ++l) {
            const Lane& lane = lanes[l];
            for (std::size_t i = 0; i < lane.size(); ++i) {
                const Vehicle& v = lane[i];
                if (v.pos < -eps || v.pos > link.length + eps) {
                    report("vehicle ", v.id, " off link ", link.id, " at pos ", v.pos);
                }
                if (v.speed < 0.0 || v.speed > params.vmax + eps) {
                    report("vehicle ", v.id, " speed ", v.speed, " out of range");
                }
                if (v.link_wait < 0) {
                    report("vehicle ", v.id, " negative wait");
                }
                if (v.route != link.route || v.route_index != link.route_index || v.lane != static_cast<int>(l)) {
                    report("vehicle ", v.id, " bookkeeping does not match link ", link.id);
                }
                if (i > 0 && lane[i - 1].pos - v.pos < params.vehicle_length - eps) {
                    report("overlap on link ", link.id, " lane ", l, ": ", lane[i - 1].id, " and ", v.id);
                }
            }
        }
    }

    for (std::size_t i = 0; i < state.signals.size(); ++i) {
        const SignalState& sig = state.signals[i];
        if (sig.elapsed < 0 || sig.yellow_remaining < 0 || sig.yellow_remaining > params.yellow_time) {
            report("signal ", i, " timers out of range");
        }
        if (sig.pending_phase.has_value() != sig.in_yellow()) {
            report("signal ", i, " pending phase inconsistent with yellow");
        }
    }
    return out;
}

}  // namespace gridsig
