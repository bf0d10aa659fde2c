#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gridsig/metrics.hpp"

namespace gridsig {

struct PlotSeries {
    std::string label;
    RunAggregate aggregate;
};

struct PlotOptions {
    std::size_t window = 15;
    std::size_t trim_head = 1000;
    std::size_t trim_tail = 1000;
    std::vector<std::int64_t> switch_times;
    std::string title = "Total waiting time";
    int width = 960;
    int height = 480;
    std::size_t max_points = 2000;  // per polyline, after smoothing
};

/// Self-contained SVG line chart: smoothed mean per series, a +/- std band,
/// dashed markers at context switches and a legend. Throws on an empty
/// series list.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);

/// Collects aggregate.csv files from dir itself or its immediate
/// subdirectories; labels come from the directory name.
std::vector<PlotSeries> load_plot_series(const std::filesystem::path& dir);

/// Context switch times from the first manifest.json found next to the
/// aggregates (multiples of switch_period below horizon).
std::vector<std::int64_t> switch_times_from_manifests(const std::filesystem::path& dir);

std::string xml_escape(const std::string& text);

}  // namespace gridsig
