#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridsig/net.hpp"
#include "gridsig/rng.hpp"

namespace gridsig {

struct SimParams {
    double vmax = 13.89;
    double accel = 2.6;
    double decel = 4.5;
    double vehicle_length = kDefaultVehicleLength;
    double min_gap = kDefaultMinGap;
    double stop_speed_threshold = 0.1;
    int yellow_time = 2;
    double tau = 1.3;  // driver reaction time in the safe-speed rule, s

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;
};

struct Vehicle {
    int id = 0;
    int route = 0;
    int route_index = 0;
    int lane = 0;
    double pos = 0.0;    // front bumper, meters from link start
    double speed = 0.0;  // m/s
    std::int64_t link_wait = 0;  // seconds below the stop threshold on the current link
    std::int64_t insert_time = 0;

    bool operator==(const Vehicle&) const = default;
};

enum class Light : std::uint8_t { green, yellow, red };

enum class SignalCommand : std::uint8_t { keep = 0, change = 1 };

const char* to_string(SignalCommand cmd);

struct SignalState {
    int green_phase = 0;
    int elapsed = 0;  // seconds of green in the current phase
    int yellow_remaining = 0;
    std::optional<int> pending_phase;

    bool in_yellow() const { return yellow_remaining > 0; }
    bool operator==(const SignalState&) const = default;
};

/// Raised when a command outside the action mask reaches the signal.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

constexpr int kMinGreen = 10;
constexpr int kMaxGreen = 50;

/// keep leaves the signal untouched; change starts the yellow interval
/// towards the other phase. Throws ContractViolation for masked-out commands
/// (change before kMinGreen, keep at or beyond kMaxGreen, anything but keep
/// during yellow).
SignalState apply_signal_command(SignalState sig, SignalCommand cmd, int yellow_time = 2);

/// Advances a signal by one second: yellow counts down and hands over to the
/// pending phase with elapsed reset, otherwise elapsed green grows.
void advance_signal(SignalState& sig);

Light light_for(const SignalState& sig, Axis axis);

struct SpeedUpdate {
    double speed = 0.0;
    double pos = 0.0;
};

/// Nearest obstacle ahead: net gap in meters (already reduced by min_gap for
/// leaders) and its speed after this tick's update.
struct Obstacle {
    double gap = 0.0;
    double speed = 0.0;
};

/// One-second Krauss-style update with no driver imperfection. The stop line
/// binds only when light is yellow or red; stop_line_gap is ignored on green.
SpeedUpdate car_following_update(const Vehicle& vehicle, std::optional<Obstacle> leader,
                                 std::optional<double> stop_line_gap, Light light,
                                 const SimParams& params);

/// Largest speed from which a vehicle can still stop within gap, given the
/// obstacle's own braking distance.
double safe_speed(double gap, double obstacle_speed, double decel, double tau = 1.0);

struct PendingInsertion {
    int vehicle_id = 0;
    std::int64_t request_time = 0;
};

using Lane = std::deque<Vehicle>;  // front() is the most downstream vehicle

struct SimState {
    std::int64_t clock = 0;
    std::vector<std::vector<Lane>> lanes;  // [link][lane]
    std::vector<std::deque<PendingInsertion>> backlog;  // per route, FIFO
    std::vector<SignalState> signals;  // per intersection
    Rng rng;  // insertion stream
    std::int64_t inserted = 0;  // insertion requests accepted, including backlog
    std::int64_t arrived = 0;
    int next_vehicle_id = 0;

    std::int64_t active_count() const;
    std::int64_t backlog_count() const;
};

SimState make_initial_state(const GridNetwork& net, std::uint64_t insertion_seed);

/// Advances one simulated second. Each entry of insertions is a route index
/// requesting one vehicle this second.
void step(SimState& state, const GridNetwork& net, const SimParams& params,
          std::span<const int> insertions);

struct MovementCounts {
    int vehicles = 0;
    int queued = 0;
};

MovementCounts movement_counts(const SimState& state, const GridNetwork& net, int intersection,
                               int phase, const SimParams& params = {});

/// Cumulative waiting time of the vehicles on all incoming links of an
/// intersection.
std::int64_t intersection_waiting_time(const SimState& state, const GridNetwork& net, int intersection);

/// Structural invariants: conservation, lane ordering and spacing, position
/// bounds, signal consistency. Returns one message per violation.
std::vector<std::string> check_invariants(const SimState& state, const GridNetwork& net,
                                          const SimParams& params);

}  // namespace gridsig
