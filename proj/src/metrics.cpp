#include "gridsig/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gridsig {

std::int64_t total_waiting(const SimState& state, const GridNetwork& net) {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < net.intersections().size(); ++i) {
        total += intersection_waiting_time(state, net, static_cast<int>(i));
    }
    return total;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (window < 1) {
        throw std::invalid_argument("moving average window must be >= 1");
    }
    std::vector<double> out(series.size());
    // Sums are recomputed per sample: exact for integer-valued series and
    // free of drift on long runs.
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::size_t begin = i + 1 >= window ? i + 1 - window : 0;
        double sum = 0.0;
        for (std::size_t j = begin; j <= i; ++j) {
            sum += series[j];
        }
        out[i] = sum / static_cast<double>(i + 1 - begin);
    }
    return out;
}

RunAggregate aggregate_runs(std::span<const TimeSeries> runs) {
    if (runs.empty()) {
        throw std::invalid_argument("no runs to aggregate");
    }
    const std::size_t horizon = runs.front().values.size();
    for (const TimeSeries& run : runs) {
        if (run.values.size() != horizon) {
            throw std::invalid_argument("run '" + run.label + "' has " + std::to_string(run.values.size()) +
                                        " samples, expected " + std::to_string(horizon));
        }
    }
    RunAggregate agg;
    agg.n_runs = runs.size();
    agg.mean.assign(horizon, 0.0);
    agg.std.assign(horizon, 0.0);
    const auto n = static_cast<double>(runs.size());
    for (std::size_t t = 0; t < horizon; ++t) {
        double sum = 0.0;
        for (const TimeSeries& run : runs) {
            sum += run.values[t];
        }
        double mean = sum / n;
        double sq = 0.0;
        for (const TimeSeries& run : runs) {
            double d = run.values[t] - mean;
            sq += d * d;
        }
        agg.mean[t] = mean;
        agg.std[t] = std::sqrt(sq / n);
    }
    return agg;
}

double window_mean(std::span<const double> series, std::size_t begin, std::size_t end) {
    end = std::min(end, series.size());
    if (begin >= end) {
        throw std::invalid_argument("empty window");
    }
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        sum += series[i];
    }
    return sum / static_cast<double>(end - begin);
}

double window_max(std::span<const double> series, std::size_t begin, std::size_t end) {
    end = std::min(end, series.size());
    if (begin >= end) {
        throw std::invalid_argument("empty window");
    }
    return *std::max_element(series.begin() + static_cast<std::ptrdiff_t>(begin),
                             series.begin() + static_cast<std::ptrdiff_t>(end));
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

template <typename T>
T parse_cell(const std::string& cell, int line_no) {
    T v{};
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + cell + "'");
    }
    return v;
}

void expect_header(std::istream& is, const char* header) {
    std::string line;
    if (!std::getline(is, line) || line != header) {
        throw std::invalid_argument(std::string("expected CSV header '") + header + "'");
    }
}

}  // namespace

void write_run_csv(std::ostream& os, std::span<const RunRow> rows) {
    os << kRunCsvHeader << '\n';
    for (const RunRow& r : rows) {
        os << r.step << ',' << r.total_waiting << ',' << r.backlog << ',' << r.context_index << '\n';
    }
}

std::vector<RunRow> read_run_csv(std::istream& is) {
    expect_header(is, kRunCsvHeader);
    std::vector<RunRow> rows;
    std::string line;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv(line);
        if (cells.size() != 4) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 4 columns");
        }
        rows.push_back(RunRow{parse_cell<std::int64_t>(cells[0], line_no), parse_cell<std::int64_t>(cells[1], line_no),
                              parse_cell<std::int64_t>(cells[2], line_no), parse_cell<int>(cells[3], line_no)});
    }
    return rows;
}

void write_aggregate_csv(std::ostream& os, const RunAggregate& agg) {
    os << kAggregateCsvHeader << '\n';
    for (std::size_t t = 0; t < agg.mean.size(); ++t) {
        os << t << ',' << format_number(agg.mean[t]) << ',' << format_number(agg.std[t]) << ',' << agg.n_runs << '\n';
    }
}

RunAggregate read_aggregate_csv(std::istream& is) {
    expect_header(is, kAggregateCsvHeader);
    RunAggregate agg;
    std::string line;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv(line);
        if (cells.size() != 4) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 4 columns");
        }
        agg.mean.push_back(parse_cell<double>(cells[1], line_no));
        agg.std.push_back(parse_cell<double>(cells[2], line_no));
        agg.n_runs = parse_cell<std::size_t>(cells[3], line_no);
    }
    return agg;
}

RunAggregate read_aggregate_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read_aggregate_csv(in);
}

}  // namespace gridsig
