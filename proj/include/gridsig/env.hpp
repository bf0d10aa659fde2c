#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gridsig/net.hpp"
#include "gridsig/sim.hpp"

namespace gridsig {

enum class ObservationMode : std::uint8_t { full, partial };

const char* to_string(ObservationMode mode);
ObservationMode parse_observation_mode(const std::string& text);

/// Per-phase attributes are indexed by phase (0 = NS, 1 = WE). In partial
/// mode density is not observed and stays empty.
struct Observation {
    ObservationMode mode = ObservationMode::full;
    int phase = 0;
    int elapsed = 0;
    std::vector<double> density;
    std::vector<double> queue;

    /// Flat vector in wire order: [phase, elapsed, density_1, queue_1, ...]
    /// for full mode and [phase, elapsed, queue_1, ...] for partial mode.
    std::vector<double> values() const;
};

Observation observe(const SimState& state, const GridNetwork& net, int intersection, ObservationMode mode,
                    const SimParams& params = {});

constexpr int kElapsedBinWidth = 5;
constexpr int kMaxElapsedBin = 10;
constexpr std::size_t kMaxStateFields = 7;

/// Small-integer state key (phase, elapsed bin, attribute bins in wire order).
class DiscretizedState {
public:
    DiscretizedState() = default;
    explicit DiscretizedState(std::vector<int> fields);

    const std::vector<int>& fields() const { return fields_; }

    /// Packs fields into one integer, 8 bits each, first field most
    /// significant. Ordering of codes matches lexicographic order of fields
    /// for keys of equal length.
    std::uint64_t code() const;
    static DiscretizedState from_code(std::uint64_t code, std::size_t size);

    std::string to_string() const;

    bool operator==(const DiscretizedState&) const = default;
    auto operator<=>(const DiscretizedState&) const = default;

private:
    std::vector<int> fields_;
};

int attribute_bin(double value, int bins);
int elapsed_bin(int elapsed);

DiscretizedState discretize(const Observation& obs, int bins);

struct ActionMask {
    bool keep_allowed = true;
    bool change_allowed = false;

    bool allows(SignalCommand cmd) const {
        return cmd == SignalCommand::keep ? keep_allowed : change_allowed;
    }
};

ActionMask action_mask(int elapsed);

/// Mask for a signal; yellow counts as zero elapsed green of the next phase.
ActionMask action_mask(const SignalState& sig);

double reward(double waiting_before, double waiting_after);

}  // namespace gridsig
