#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "gridsig/net.hpp"
#include "gridsig/rng.hpp"

namespace gridsig {

struct ODFlow {
    int route = 0;
    double period = 1.0;  // seconds per vehicle
};

struct Context {
    std::string name;
    std::vector<ODFlow> flows;
};

struct ContextSchedule {
    std::vector<Context> contexts;
    std::int64_t switch_period = 20000;
    int start_index = 0;

    void validate(const GridNetwork& net) const;
};

enum class InsertionMode { bernoulli, deterministic };

/// Index into schedule.contexts active at the given second.
int active_context_index(const ContextSchedule& schedule, std::int64_t clock);
const Context& active_context(const ContextSchedule& schedule, std::int64_t clock);

/// Routes receiving a vehicle this second. Bernoulli mode draws one uniform
/// per flow in flow order; deterministic mode fires whenever the running
/// count floor((clock + 1) / period) increases.
std::vector<int> insertion_requests(const Context& context, std::int64_t clock, Rng& rng,
                                    InsertionMode mode = InsertionMode::bernoulli);

/// Exact rational for rate bookkeeping.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);

    Rational operator+(const Rational& o) const { return Rational(num * o.den + o.num * den, den * o.den); }
    bool operator==(const Rational&) const = default;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Sum of 1/period over all flows. Throws if a period is not a whole number
/// of seconds.
Rational exact_total_rate(const Context& context);

/// Every OD route with the same period.
Context uniform_context(const GridNetwork& net, std::string name, double period);

/// NS routes at ns_period, WE routes at we_period.
Context axis_context(const GridNetwork& net, std::string name, double ns_period, double we_period);

/// The two built-in contexts: balanced (one vehicle every 3 s everywhere)
/// and WE-heavy (6 s on NS routes, 2 s on WE routes).
ContextSchedule default_schedule(const GridNetwork& net, std::int64_t switch_period = 20000);

}  // namespace gridsig
