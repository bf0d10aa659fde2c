#include "gridsig/agents.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gridsig {

ActionValues QTable::values(const DiscretizedState& s) const {
    auto it = table_.find(slot(s));
    return it == table_.end() ? ActionValues{} : it->second.q;
}

double QTable::value(const DiscretizedState& s, SignalCommand a) const {
    return values(s)[static_cast<std::size_t>(a)];
}

double QTable::max_value(const DiscretizedState& s) const {
    ActionValues q = values(s);
    return *std::max_element(q.begin(), q.end());
}

void QTable::set(const DiscretizedState& s, SignalCommand a, double v) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument("Q-value must be finite");
    }
    Entry& e = table_[slot(s)];
    e.width = s.fields().size();
    e.q[static_cast<std::size_t>(a)] = v;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("malformed Q-value '" + text + "'");
    }
    return v;
}

}  // namespace

void QTable::write(std::ostream& os) const {
    std::map<DiscretizedState, ActionValues> sorted;
    for (const auto& [key, entry] : table_) {
        std::uint64_t code = key & ~(std::uint64_t{0xF} << 60);
        sorted.emplace(DiscretizedState::from_code(code, entry.width), entry.q);
    }
    for (const auto& [state, q] : sorted) {
        os << state.to_string();
        for (double v : q) {
            os << '\t' << format_double(v);
        }
        os << '\n';
    }
}

QTable QTable::read(std::istream& is) {
    QTable out;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream cols(line);
        std::string key, keep, change, extra;
        if (!std::getline(cols, key, '\t') || !std::getline(cols, keep, '\t') || !std::getline(cols, change, '\t') ||
            std::getline(cols, extra, '\t')) {
            throw std::invalid_argument("Q-table line " + std::to_string(line_no) + ": expected 3 tab-separated columns");
        }
        std::vector<int> fields;
        std::istringstream ks(key);
        std::string f;
        while (std::getline(ks, f, ',')) {
            fields.push_back(std::stoi(f));
        }
        DiscretizedState s(std::move(fields));
        out.set(s, SignalCommand::keep, parse_double(keep));
        out.set(s, SignalCommand::change, parse_double(change));
    }
    return out;
}

std::string QTable::serialize() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

std::uint64_t QTable::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

SignalCommand select_action(const QTable& q, const DiscretizedState& s, const ActionMask& mask, double epsilon,
                            Rng& rng) {
    if (!mask.keep_allowed && !mask.change_allowed) {
        throw ContractViolation("action mask permits nothing");
    }
    if (!mask.keep_allowed) {
        return SignalCommand::change;
    }
    if (!mask.change_allowed) {
        return SignalCommand::keep;
    }
    if (epsilon > 0.0 && rng.uniform() < epsilon) {
        return static_cast<SignalCommand>(rng.below(kNumActions));
    }
    ActionValues values = q.values(s);
    return values[1] > values[0] ? SignalCommand::change : SignalCommand::keep;
}

void update(QTable& q, const DiscretizedState& s, SignalCommand a, double r, const DiscretizedState& s_next,
            double alpha, double gamma) {
    if (alpha == 0.0) {
        return;
    }
    double current = q.value(s, a);
    double target = r + gamma * q.max_value(s_next);
    q.set(s, a, current + alpha * (target - current));
}

double EpsilonSchedule::at(std::int64_t selections) const {
    switch (kind) {
        case Kind::decaying:
            return std::max(start * std::pow(factor, static_cast<double>(selections)), floor);
        case Kind::fixed:
            return start;
        case Kind::zero:
            return 0.0;
    }
    return 0.0;
}

const char* to_string(EpsilonSchedule::Kind kind) {
    switch (kind) {
        case EpsilonSchedule::Kind::decaying:
            return "decaying";
        case EpsilonSchedule::Kind::fixed:
            return "fixed";
        case EpsilonSchedule::Kind::zero:
            return "zero";
    }
    return "?";
}

EpsilonSchedule::Kind parse_epsilon_kind(const std::string& text) {
    if (text == "decaying") {
        return EpsilonSchedule::Kind::decaying;
    }
    if (text == "fixed") {
        return EpsilonSchedule::Kind::fixed;
    }
    if (text == "zero") {
        return EpsilonSchedule::Kind::zero;
    }
    throw std::invalid_argument("unknown epsilon schedule '" + text + "'");
}

void AgentConfig::validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(alpha)) {
        throw std::invalid_argument("alpha must lie in [0, 1]");
    }
    if (!unit(gamma)) {
        throw std::invalid_argument("gamma must lie in [0, 1]");
    }
    if (!unit(epsilon.start) || !unit(epsilon.floor)) {
        throw std::invalid_argument("epsilon must lie in [0, 1]");
    }
    if (!(epsilon.factor > 0.0 && epsilon.factor <= 1.0)) {
        throw std::invalid_argument("epsilon factor must lie in (0, 1]");
    }
}

QLearningAgent::QLearningAgent(AgentConfig config, std::uint64_t exploration_seed)
    : config_(config), rng_(exploration_seed), frozen_(config.frozen) {
    config_.validate();
}

double QLearningAgent::epsilon() const {
    return frozen_ ? 0.0 : config_.epsilon.at(selections_);
}

SignalCommand QLearningAgent::act(const DiscretizedState& s, const ActionMask& mask) {
    SignalCommand a = select_action(table_, s, mask, epsilon(), rng_);
    ++selections_;
    return a;
}

void QLearningAgent::learn(const DiscretizedState& s, SignalCommand a, double r, const DiscretizedState& s_next) {
    update(table_, s, a, r, s_next, alpha(), config_.gamma);
}

void QLearningAgent::freeze() {
    frozen_ = true;
}

void FixedPolicyConfig::validate() const {
    if (green_time <= 0) {
        throw std::invalid_argument("green_time must be positive");
    }
    if (yellow_time <= 0) {
        throw std::invalid_argument("yellow_time must be positive");
    }
}

SignalCommand fixed_policy_decide(const SignalState& sig, const FixedPolicyConfig& cfg) {
    if (sig.in_yellow()) {
        return SignalCommand::keep;
    }
    return sig.elapsed >= cfg.green_time ? SignalCommand::change : SignalCommand::keep;
}

}  // namespace gridsig
