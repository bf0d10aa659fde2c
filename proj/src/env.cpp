#include "gridsig/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gridsig {

const char* to_string(ObservationMode mode) {
    return mode == ObservationMode::full ? "full" : "partial";
}

ObservationMode parse_observation_mode(const std::string& text) {
    if (text == "full") {
        return ObservationMode::full;
    }
    if (text == "partial") {
        return ObservationMode::partial;
    }
    throw std::invalid_argument("unknown observation mode '" + text + "'");
}

std::vector<double> Observation::values() const {
    std::vector<double> out{static_cast<double>(phase), static_cast<double>(elapsed)};
    for (std::size_t i = 0; i < queue.size(); ++i) {
        if (mode == ObservationMode::full) {
            out.push_back(density[i]);
        }
        out.push_back(queue[i]);
    }
    return out;
}

Observation observe(const SimState& state, const GridNetwork& net, int intersection, ObservationMode mode,
                    const SimParams& params) {
    const Intersection& inter = net.intersections().at(static_cast<std::size_t>(intersection));
    const SignalState& sig = state.signals.at(static_cast<std::size_t>(intersection));
    Observation obs;
    obs.mode = mode;
    obs.phase = sig.in_yellow() ? sig.pending_phase.value_or(sig.green_phase) : sig.green_phase;
    obs.elapsed = sig.in_yellow() ? 0 : sig.elapsed;
    for (const Phase& phase : inter.phases) {
        auto capacity = static_cast<double>(phase_capacity(net, phase, params.vehicle_length, params.min_gap));
        MovementCounts counts = movement_counts(state, net, intersection, phase.index, params);
        double density = capacity > 0 ? std::min(1.0, counts.vehicles / capacity) : 0.0;
        double queue = capacity > 0 ? std::min(1.0, counts.queued / capacity) : 0.0;
        if (mode == ObservationMode::full) {
            obs.density.push_back(density);
        }
        obs.queue.push_back(queue);
    }
    return obs;
}

DiscretizedState::DiscretizedState(std::vector<int> fields) : fields_(std::move(fields)) {
    if (fields_.size() > kMaxStateFields) {
        throw std::invalid_argument("state key has too many fields");
    }
    for (int f : fields_) {
        if (f < 0 || f > 255) {
            throw std::invalid_argument("state key field out of range");
        }
    }
}

std::uint64_t DiscretizedState::code() const {
    std::uint64_t code = 0;
    for (int f : fields_) {
        code = (code << 8) | static_cast<std::uint64_t>(f);
    }
    return code;
}

DiscretizedState DiscretizedState::from_code(std::uint64_t code, std::size_t size) {
    std::vector<int> fields(size);
    for (std::size_t i = size; i-- > 0;) {
        fields[i] = static_cast<int>(code & 0xFF);
        code >>= 8;
    }
    return DiscretizedState(std::move(fields));
}

std::string DiscretizedState::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i) {
            os << ',';
        }
        os << fields_[i];
    }
    return os.str();
}

int attribute_bin(double value, int bins) {
    if (bins < 1) {
        throw std::invalid_argument("bins must be >= 1");
    }
    double clamped = std::clamp(value, 0.0, 1.0);
    return std::min(static_cast<int>(std::floor(clamped * bins)), bins - 1);
}

int elapsed_bin(int elapsed) {
    return std::min(std::max(elapsed, 0) / kElapsedBinWidth, kMaxElapsedBin);
}

DiscretizedState discretize(const Observation& obs, int bins) {
    std::vector<int> fields{obs.phase, elapsed_bin(obs.elapsed)};
    for (std::size_t i = 0; i < obs.queue.size(); ++i) {
        if (obs.mode == ObservationMode::full) {
            fields.push_back(attribute_bin(obs.density[i], bins));
        }
        fields.push_back(attribute_bin(obs.queue[i], bins));
    }
    return DiscretizedState(std::move(fields));
}

ActionMask action_mask(int elapsed) {
    if (elapsed < 0) {
        throw std::invalid_argument("elapsed green must be non-negative");
    }
    return ActionMask{elapsed < kMaxGreen, elapsed >= kMinGreen};
}

ActionMask action_mask(const SignalState& sig) {
    return action_mask(sig.in_yellow() ? 0 : sig.elapsed);
}

double reward(double waiting_before, double waiting_after) {
    return waiting_before - waiting_after;
}

}  // namespace gridsig
