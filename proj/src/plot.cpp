#include "gridsig/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gridsig {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Frame {
    double left = 70, right = 20, top = 40, bottom = 50;
    double width = 0, height = 0;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

    double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
    double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

double nice_step(double span, int target_ticks) {
    double raw = span / std::max(1, target_ticks);
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << v;
    return os.str();
}

std::string tick_label(double v) {
    std::ostringstream os;
    if (std::abs(v) >= 1000 && std::fmod(v, 1000.0) == 0.0) {
        os << static_cast<long long>(v / 1000) << "k";
    } else {
        os << v;
    }
    return os.str();
}

}  // namespace

std::string xml_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
    if (series.empty()) {
        throw std::invalid_argument("nothing to plot");
    }

    struct Prepared {
        std::vector<double> x, mean, lo, hi;
    };
    std::vector<Prepared> prepared;
    double ymax = 0.0;
    double xmin = std::numeric_limits<double>::max();
    double xmax = std::numeric_limits<double>::lowest();
    for (const PlotSeries& s : series) {
        const std::size_t n = s.aggregate.mean.size();
        auto mean = moving_average(s.aggregate.mean, options.window);
        auto sd = moving_average(s.aggregate.std, options.window);
        std::size_t begin = std::min(options.trim_head, n);
        std::size_t end = n > options.trim_tail ? n - options.trim_tail : 0;
        if (begin >= end) {
            begin = 0;
            end = n;
        }
        std::size_t stride = std::max<std::size_t>(1, (end - begin) / std::max<std::size_t>(1, options.max_points));
        Prepared p;
        for (std::size_t i = begin; i < end; i += stride) {
            p.x.push_back(static_cast<double>(i));
            p.mean.push_back(mean[i]);
            p.lo.push_back(std::max(0.0, mean[i] - sd[i]));
            p.hi.push_back(mean[i] + sd[i]);
            ymax = std::max(ymax, mean[i] + sd[i]);
        }
        if (!p.x.empty()) {
            xmin = std::min(xmin, p.x.front());
            xmax = std::max(xmax, p.x.back());
        }
        prepared.push_back(std::move(p));
    }
    if (xmin >= xmax) {
        xmin = 0;
        xmax = std::max(1.0, xmax);
    }
    if (ymax <= 0.0) {
        ymax = 1.0;
    }

    Frame f;
    f.width = options.width;
    f.height = options.height;
    f.x0 = xmin;
    f.x1 = xmax;
    double ystep = nice_step(ymax, 6);
    f.y0 = 0;
    f.y1 = std::ceil(ymax / ystep) * ystep;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << fmt(f.width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << xml_escape(options.title) << "</text>\n";

    // Grid and axes.
    svg << "<g class=\"axes\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
    for (double y = f.y0; y <= f.y1 + 1e-9; y += ystep) {
        svg << "<line x1=\"" << fmt(f.px(f.x0)) << "\" y1=\"" << fmt(f.py(y)) << "\" x2=\"" << fmt(f.px(f.x1))
            << "\" y2=\"" << fmt(f.py(y)) << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<g class=\"labels\" fill=\"#333333\">\n";
    for (double y = f.y0; y <= f.y1 + 1e-9; y += ystep) {
        svg << "<text x=\"" << fmt(f.left - 6) << "\" y=\"" << fmt(f.py(y) + 4) << "\" text-anchor=\"end\">"
            << tick_label(y) << "</text>\n";
    }
    double xstep = nice_step(f.x1 - f.x0, 8);
    for (double x = std::ceil(f.x0 / xstep) * xstep; x <= f.x1 + 1e-9; x += xstep) {
        svg << "<text x=\"" << fmt(f.px(x)) << "\" y=\"" << fmt(f.height - f.bottom + 18)
            << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
    }
    svg << "<text x=\"" << fmt(f.width / 2) << "\" y=\"" << fmt(f.height - 8)
        << "\" text-anchor=\"middle\">time (s)</text>\n";
    svg << "<text transform=\"rotate(-90)\" x=\"" << fmt(-f.height / 2) << "\" y=\"16\" text-anchor=\"middle\">"
        << "waiting time (s)</text>\n";
    svg << "</g>\n";
    svg << "<rect x=\"" << fmt(f.left) << "\" y=\"" << fmt(f.top) << "\" width=\"" << fmt(f.width - f.left - f.right)
        << "\" height=\"" << fmt(f.height - f.top - f.bottom) << "\" fill=\"none\" stroke=\"#333333\"/>\n";

    for (std::int64_t t : options.switch_times) {
        auto x = static_cast<double>(t);
        if (x < f.x0 || x > f.x1) {
            continue;
        }
        svg << "<line class=\"switch\" x1=\"" << fmt(f.px(x)) << "\" y1=\"" << fmt(f.top) << "\" x2=\"" << fmt(f.px(x))
            << "\" y2=\"" << fmt(f.height - f.bottom) << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>\n";
    }

    for (std::size_t s = 0; s < prepared.size(); ++s) {
        const Prepared& p = prepared[s];
        if (p.x.empty()) {
            continue;
        }
        const char* color = kPalette[s % std::size(kPalette)];
        svg << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < p.x.size(); ++i) {
            svg << fmt(f.px(p.x[i])) << ',' << fmt(f.py(p.hi[i])) << ' ';
        }
        for (std::size_t i = p.x.size(); i-- > 0;) {
            svg << fmt(f.px(p.x[i])) << ',' << fmt(f.py(p.lo[i])) << (i ? " " : "");
        }
        svg << "\"/>\n";
        svg << "<polyline class=\"mean\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < p.x.size(); ++i) {
            svg << (i ? " " : "") << fmt(f.px(p.x[i])) << ',' << fmt(f.py(p.mean[i]));
        }
        svg << "\"/>\n";
    }

    svg << "<g class=\"legend\">\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        double y = f.top + 16 + 18.0 * static_cast<double>(s);
        double x = f.width - f.right - 170;
        const char* color = kPalette[s % std::size(kPalette)];
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x + 24) << "\" y2=\"" << fmt(y)
            << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>";
        svg << "<text x=\"" << fmt(x + 30) << "\" y=\"" << fmt(y + 4) << "\">" << xml_escape(series[s].label)
            << " (n=" << series[s].aggregate.n_runs << ")</text>\n";
    }
    svg << "</g>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::vector<PlotSeries> load_plot_series(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("not a directory: " + dir.string());
    }
    std::vector<fs::path> found;
    if (fs::exists(dir / "aggregate.csv")) {
        found.push_back(dir / "aggregate.csv");
    }
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && fs::exists(entry.path() / "aggregate.csv")) {
            subdirs.push_back(entry.path() / "aggregate.csv");
        }
    }
    std::sort(subdirs.begin(), subdirs.end());
    found.insert(found.end(), subdirs.begin(), subdirs.end());

    std::vector<PlotSeries> out;
    for (const fs::path& p : found) {
        std::string label = p.parent_path().filename().string();
        std::ifstream manifest(p.parent_path() / "manifest.json");
        if (manifest) {
            auto j = nlohmann::json::parse(manifest, nullptr, false);
            if (!j.is_discarded() && j.contains("label") && j["label"].is_string()) {
                label = j["label"].get<std::string>();
            }
        }
        out.push_back(PlotSeries{label, read_aggregate_csv(p)});
    }
    return out;
}

std::vector<std::int64_t> switch_times_from_manifests(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> candidates{dir / "manifest.json"};
    if (fs::is_directory(dir)) {
        std::vector<fs::path> subs;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_directory()) {
                subs.push_back(entry.path() / "manifest.json");
            }
        }
        std::sort(subs.begin(), subs.end());
        candidates.insert(candidates.end(), subs.begin(), subs.end());
    }
    for (const fs::path& p : candidates) {
        std::ifstream in(p);
        if (!in) {
            continue;
        }
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("config")) {
            continue;
        }
        const auto& cfg = j["config"];
        auto period = cfg.value("switch_period", std::int64_t{0});
        auto horizon = cfg.value("horizon", std::int64_t{0});
        std::vector<std::int64_t> out;
        if (period > 0 && cfg.contains("contexts") && cfg["contexts"].size() > 1) {
            for (std::int64_t t = period; t < horizon; t += period) {
                out.push_back(t);
            }
        }
        return out;
    }
    return {};
}

}  // namespace gridsig
