// Command-line front end: run presets or config files, plot aggregates.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gridsig/config.hpp"
#include "gridsig/plot.hpp"
#include "gridsig/runner.hpp"

namespace fs = std::filesystem;
using namespace gridsig;

namespace {

constexpr const char* kOutRootEnv = "GRIDSIG_OUT_ROOT";

fs::path default_out(const std::string& name) {
    const char* root = std::getenv(kOutRootEnv);
    return fs::path(root && *root ? root : "runs") / name;
}

int do_run(const std::string& preset_name, const std::string& config_path, std::optional<int> runs,
           std::optional<std::int64_t> horizon, std::optional<std::uint64_t> seed, const std::string& out,
           unsigned jobs, bool save_qtables) {
    std::vector<ScenarioConfig> configs;
    std::string name;
    if (!config_path.empty()) {
        configs.push_back(load_config(config_path));
        name = configs.front().label;
    } else {
        configs = preset(preset_name);
        name = preset_name;
    }

    fs::path root = out.empty() ? default_out(name) : fs::path(out);
    if (!config_path.empty() && out.empty() && !configs.front().output_dir.empty()) {
        root = configs.front().output_dir;
    }

    for (ScenarioConfig& cfg : configs) {
        if (runs) {
            cfg.n_runs = *runs;
        }
        if (horizon) {
            cfg.horizon = *horizon;
        }
        if (seed) {
            cfg.base_seed = *seed;
        }
        if (save_qtables) {
            cfg.save_qtables = true;
        }
        cfg.output_dir = (configs.size() > 1 ? root / cfg.label : root).string();
        cfg.validate();
    }

    for (const ScenarioConfig& cfg : configs) {
        std::cerr << "running " << cfg.label << ": " << cfg.n_runs << " run(s) x " << cfg.horizon << " s\n";
        ExperimentResult result = run_experiment(cfg, jobs);
        write_experiment(result, cfg.output_dir);
        std::cerr << "  wrote " << cfg.output_dir << '\n';
    }
    return 0;
}

int do_plot(const std::string& in, const std::string& out, std::size_t window, std::size_t trim,
            const std::string& title) {
    auto series = load_plot_series(in);
    if (series.empty()) {
        throw std::runtime_error("no aggregate.csv found under " + in);
    }
    PlotOptions options;
    options.window = window;
    options.trim_head = trim;
    options.trim_tail = trim;
    options.switch_times = switch_times_from_manifests(in);
    if (!title.empty()) {
        options.title = title;
    }
    std::string svg = render_svg(series, options);
    std::ofstream file(out, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write " + out);
    }
    file << svg;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid traffic-signal simulator with independent Q-learning agents"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a preset or a scenario config file");
    std::string preset_name;
    std::string config_path;
    std::optional<int> runs;
    std::optional<std::int64_t> horizon;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned jobs = 0;
    bool save_qtables = false;
    auto* preset_opt = run->add_option("--preset", preset_name, "fixed-baseline | freeze | observability | discretization");
    auto* config_opt = run->add_option("--config", config_path, "Scenario config (JSON)")->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    run->add_option("--runs", runs, "Number of seeded runs")->check(CLI::PositiveNumber);
    run->add_option("--horizon", horizon, "Simulated seconds per run")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Base seed; run i uses seed + i");
    run->add_option("--out", out, std::string("Output directory (default $") + kOutRootEnv + "/<name> or runs/<name>)");
    run->add_option("--jobs", jobs, "Concurrent runs (0 = hardware threads)");
    run->add_flag("--save-qtables", save_qtables, "Write final Q-tables per run");

    auto* plot = app.add_subcommand("plot", "Render aggregate CSVs as an SVG line chart");
    std::string plot_in;
    std::string plot_out;
    std::size_t window = 15;
    std::size_t trim = 1000;
    std::string title;
    plot->add_option("--in", plot_in, "Directory holding aggregate.csv or per-scenario subdirectories")->required();
    plot->add_option("--out", plot_out, "Output SVG file")->required();
    plot->add_option("--window", window, "Moving-average window in seconds")->check(CLI::PositiveNumber);
    plot->add_option("--trim", trim, "Seconds dropped from head and tail");
    plot->add_option("--title", title, "Chart title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            if (preset_name.empty() && config_path.empty()) {
                std::cerr << "error: run needs --preset or --config\n";
                return 2;
            }
            return do_run(preset_name, config_path, runs, horizon, seed, out, jobs, save_qtables);
        }
        if (*plot) {
            return do_plot(plot_in, plot_out, window, trim, title);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
