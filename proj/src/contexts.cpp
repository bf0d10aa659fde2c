#include "gridsig/contexts.hpp"

#include <cmath>
#include <stdexcept>

namespace gridsig {

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) {
        throw std::invalid_argument("zero denominator");
    }
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n, d);
    num = g ? n / g : 0;
    den = g ? d / g : 1;
}

void ContextSchedule::validate(const GridNetwork& net) const {
    if (contexts.empty()) {
        throw std::invalid_argument("schedule has no contexts");
    }
    if (switch_period <= 0) {
        throw std::invalid_argument("switch_period must be positive");
    }
    if (start_index < 0 || static_cast<std::size_t>(start_index) >= contexts.size()) {
        throw std::invalid_argument("start_index out of range");
    }
    for (const Context& ctx : contexts) {
        std::vector<int> seen(net.routes().size(), 0);
        for (const ODFlow& flow : ctx.flows) {
            if (flow.route < 0 || static_cast<std::size_t>(flow.route) >= seen.size()) {
                throw std::invalid_argument("context " + ctx.name + " names an unknown route");
            }
            if (!(flow.period > 0.0) || !std::isfinite(flow.period)) {
                throw std::invalid_argument("context " + ctx.name + " has a non-positive period");
            }
            ++seen[static_cast<std::size_t>(flow.route)];
        }
        for (std::size_t r = 0; r < seen.size(); ++r) {
            if (seen[r] != 1) {
                throw std::invalid_argument("context " + ctx.name + " must cover route " +
                                            net.route(static_cast<int>(r)).name + " exactly once");
            }
        }
    }
}

int active_context_index(const ContextSchedule& schedule, std::int64_t clock) {
    if (clock < 0) {
        throw std::invalid_argument("clock must be non-negative");
    }
    auto n = static_cast<std::int64_t>(schedule.contexts.size());
    return static_cast<int>((schedule.start_index + clock / schedule.switch_period) % n);
}

const Context& active_context(const ContextSchedule& schedule, std::int64_t clock) {
    return schedule.contexts[static_cast<std::size_t>(active_context_index(schedule, clock))];
}

std::vector<int> insertion_requests(const Context& context, std::int64_t clock, Rng& rng, InsertionMode mode) {
    std::vector<int> out;
    for (const ODFlow& flow : context.flows) {
        bool fire = false;
        if (mode == InsertionMode::bernoulli) {
            fire = rng.bernoulli(1.0 / flow.period);
        } else {
            auto before = static_cast<std::int64_t>(std::floor(static_cast<double>(clock) / flow.period));
            auto after = static_cast<std::int64_t>(std::floor(static_cast<double>(clock + 1) / flow.period));
            fire = after > before;
        }
        if (fire) {
            out.push_back(flow.route);
        }
    }
    return out;
}

Rational exact_total_rate(const Context& context) {
    Rational total(0, 1);
    for (const ODFlow& flow : context.flows) {
        double whole = std::round(flow.period);
        if (whole != flow.period || whole <= 0.0) {
            throw std::invalid_argument("period is not a whole number of seconds");
        }
        total = total + Rational(1, static_cast<std::int64_t>(whole));
    }
    return total;
}

Context uniform_context(const GridNetwork& net, std::string name, double period) {
    return axis_context(net, std::move(name), period, period);
}

Context axis_context(const GridNetwork& net, std::string name, double ns_period, double we_period) {
    Context ctx;
    ctx.name = std::move(name);
    for (std::size_t r = 0; r < net.routes().size(); ++r) {
        double period = net.routes()[r].axis == Axis::NS ? ns_period : we_period;
        ctx.flows.push_back(ODFlow{static_cast<int>(r), period});
    }
    return ctx;
}

ContextSchedule default_schedule(const GridNetwork& net, std::int64_t switch_period) {
    ContextSchedule schedule;
    schedule.contexts.push_back(uniform_context(net, "context1", 3.0));
    schedule.contexts.push_back(axis_context(net, "context2", 6.0, 2.0));
    schedule.switch_period = switch_period;
    return schedule;
}

}  // namespace gridsig
