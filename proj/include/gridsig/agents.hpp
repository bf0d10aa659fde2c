#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>

#include "gridsig/env.hpp"
#include "gridsig/rng.hpp"
#include "gridsig/sim.hpp"

namespace gridsig {

constexpr std::size_t kNumActions = 2;
using ActionValues = std::array<double, kNumActions>;

/// Tabular action values keyed by discretized state. Unseen states read as
/// zero for every action.
class QTable {
public:
    ActionValues values(const DiscretizedState& s) const;
    double value(const DiscretizedState& s, SignalCommand a) const;
    double max_value(const DiscretizedState& s) const;
    void set(const DiscretizedState& s, SignalCommand a, double v);

    std::size_t size() const { return table_.size(); }

    /// One line per state, sorted by key: "f0,f1,...<TAB>q_keep<TAB>q_change"
    /// with values printed to round-trip exactly.
    void write(std::ostream& os) const;
    static QTable read(std::istream& is);
    std::string serialize() const;

    /// FNV-1a over serialize(); cheap equality fingerprint for tests.
    std::uint64_t fingerprint() const;

    bool operator==(const QTable&) const = default;

private:
    struct Entry {
        std::size_t width = 0;
        ActionValues q{};
        bool operator==(const Entry&) const = default;
    };
    // Keys of different widths never collide because fields are 8-bit
    // packed and width is stored alongside.
    static std::uint64_t slot(const DiscretizedState& s) {
        return s.code() ^ (static_cast<std::uint64_t>(s.fields().size()) << 60);
    }
    std::unordered_map<std::uint64_t, Entry> table_;
};

/// epsilon-greedy over the permitted actions; greedy ties go to the lowest
/// action index (keep before change).
SignalCommand select_action(const QTable& q, const DiscretizedState& s, const ActionMask& mask, double epsilon,
                            Rng& rng);

/// One Q-learning step on entry (s, a). The bootstrap max ranges over all
/// actions of s_next regardless of masking.
void update(QTable& q, const DiscretizedState& s, SignalCommand a, double r, const DiscretizedState& s_next,
            double alpha, double gamma);

struct EpsilonSchedule {
    enum class Kind { decaying, fixed, zero };
    Kind kind = Kind::decaying;
    double start = 1.0;    // decaying: initial value; fixed: the constant
    double factor = 0.9985;
    double floor = 0.0;

    static EpsilonSchedule decaying(double start = 1.0, double factor = 0.9985, double floor = 0.0) {
        return {Kind::decaying, start, factor, floor};
    }
    static EpsilonSchedule fixed(double value) { return {Kind::fixed, value, 1.0, 0.0}; }
    static EpsilonSchedule none() { return {Kind::zero, 0.0, 1.0, 0.0}; }

    /// Exploration rate after n selections.
    double at(std::int64_t selections) const;

    bool operator==(const EpsilonSchedule&) const = default;
};

const char* to_string(EpsilonSchedule::Kind kind);
EpsilonSchedule::Kind parse_epsilon_kind(const std::string& text);

struct AgentConfig {
    double alpha = 0.1;
    double gamma = 0.99;
    EpsilonSchedule epsilon = EpsilonSchedule::decaying();
    bool frozen = false;

    void validate() const;
    bool operator==(const AgentConfig&) const = default;
};

/// Independent learner controlling one intersection. Owns its table and its
/// exploration stream.
class QLearningAgent {
public:
    QLearningAgent(AgentConfig config, std::uint64_t exploration_seed);

    SignalCommand act(const DiscretizedState& s, const ActionMask& mask);
    void learn(const DiscretizedState& s, SignalCommand a, double r, const DiscretizedState& s_next);

    /// Stops learning and exploration: alpha and epsilon drop to zero.
    void freeze();
    bool frozen() const { return frozen_; }

    double alpha() const { return frozen_ ? 0.0 : config_.alpha; }
    double epsilon() const;
    std::int64_t selections() const { return selections_; }

    const QTable& table() const { return table_; }
    QTable& table() { return table_; }
    const AgentConfig& config() const { return config_; }

private:
    AgentConfig config_;
    QTable table_;
    Rng rng_;
    std::int64_t selections_ = 0;
    bool frozen_ = false;
};

struct FixedPolicyConfig {
    int green_time = 35;
    int yellow_time = 2;

    void validate() const;
    bool operator==(const FixedPolicyConfig&) const = default;
};

/// Fixed-time plan: change once the current green has lasted green_time.
SignalCommand fixed_policy_decide(const SignalState& sig, const FixedPolicyConfig& cfg);

}  // namespace gridsig
