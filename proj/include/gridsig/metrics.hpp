#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gridsig/net.hpp"
#include "gridsig/sim.hpp"

namespace gridsig {

struct TimeSeries {
    std::string label;
    std::uint64_t run_seed = 0;
    std::vector<double> values;  // one sample per simulated second
};

struct RunAggregate {
    std::vector<double> mean;
    std::vector<double> std;  // population standard deviation
    std::size_t n_runs = 0;
};

/// Sum of cumulative waiting time over every signalized intersection.
std::int64_t total_waiting(const SimState& state, const GridNetwork& net);

/// Trailing moving average; the first window-1 samples average the prefix
/// available so far.
std::vector<double> moving_average(std::span<const double> series, std::size_t window = 15);

/// Pointwise mean and population std. Throws on an empty set or on
/// mismatched lengths.
RunAggregate aggregate_runs(std::span<const TimeSeries> runs);

/// Mean of series over [begin, end) clipped to the series.
double window_mean(std::span<const double> series, std::size_t begin, std::size_t end);
double window_max(std::span<const double> series, std::size_t begin, std::size_t end);

/// One row of the per-run CSV.
struct RunRow {
    std::int64_t step = 0;
    std::int64_t total_waiting = 0;
    std::int64_t backlog = 0;
    int context_index = 0;
};

inline constexpr const char* kRunCsvHeader = "step,total_waiting,backlog,context_index";
inline constexpr const char* kAggregateCsvHeader = "step,mean,std,n";

void write_run_csv(std::ostream& os, std::span<const RunRow> rows);
std::vector<RunRow> read_run_csv(std::istream& is);

void write_aggregate_csv(std::ostream& os, const RunAggregate& agg);
RunAggregate read_aggregate_csv(std::istream& is);

RunAggregate read_aggregate_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace gridsig
