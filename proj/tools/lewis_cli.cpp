// Command-line front end: run batches, rebuild reports from runs.csv, and
// validate configurations.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lewis/config.hpp"
#include "lewis/experiment.hpp"
#include "lewis/report.hpp"

namespace {

using namespace lewis;

nlohmann::json resolve_document(const std::string& config, const std::vector<std::string>& overrides) {
    auto doc = load_config_document(config);
    for (const auto& o : overrides) apply_override(doc, o);
    return doc;
}

int cmd_run(const std::string& config_arg, std::optional<std::size_t> reps, std::optional<std::uint64_t> seed,
            int workers, std::string out_dir, std::optional<std::size_t> trace, const std::vector<std::string>& sets) {
    auto doc = resolve_document(config_arg, sets);
    if (reps) doc["repetitions"] = *reps;
    if (seed) doc["master_seed"] = *seed;
    const auto config = parse_config(doc);
    if (trace && *trace >= config.repetitions)
        throw std::runtime_error(fmt::format("--trace {} is outside the {} repetitions", *trace, config.repetitions));

    if (out_dir.empty()) {
        const char* env = std::getenv("LEWIS_OUT_DIR");
        out_dir = env && *env ? env : "out";
        out_dir += "/" + config.name;
    }
    const auto result = run_batch(config, workers, trace);
    print_summary(std::cout, config, result.summary);
    for (const auto& p : write_bundle(out_dir, result)) std::cout << "wrote " << p.string() << '\n';
    return 0;
}

int cmd_report(const std::string& runs_path, const std::string& out_dir) {
    std::ifstream in(runs_path);
    if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", runs_path));
    const auto report = report_from_runs(parse_runs_csv(in));
    print_report(std::cout, report);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream h(std::filesystem::path(out_dir) / "histograms.csv", std::ios::binary);
        std::ofstream x(std::filesystem::path(out_dir) / "crosstab.csv", std::ios::binary);
        if (!h || !x) throw std::runtime_error(fmt::format("cannot write into '{}'", out_dir));
        write_histogram_csv(h, report.histograms);
        write_crosstab_csv(x, report.crosstab);
    }
    return 0;
}

int cmd_validate(const std::string& config_arg, const std::vector<std::string>& sets) {
    const auto config = parse_config(resolve_document(config_arg, sets));
    std::cout << config.name << ": valid\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lewis signaling game simulator over separate environments"};
    app.require_subcommand(1);

    std::string config_arg, out_dir, runs_path;
    std::optional<std::size_t> reps, trace;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::vector<std::string> sets;

    auto* run = app.add_subcommand("run", "run a batch of repetitions and write the CSV bundle");
    run->add_option("config", config_arg, "preset name or JSON config path")->required();
    run->add_option("--reps", reps, "number of repetitions");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--workers", workers, "worker threads (0 = all available)")->check(CLI::NonNegativeNumber);
    run->add_option("--out", out_dir, "output directory (default $LEWIS_OUT_DIR/<name> or out/<name>)");
    run->add_option("--trace", trace, "write the episode trace of this repetition");
    run->add_option("--set", sets, "override a config field, e.g. --set phase1.episodes=2000");

    auto* report = app.add_subcommand("report", "recompute histograms and the persistence cross-tab from runs.csv");
    report->add_option("runs", runs_path, "runs.csv from a previous run")->required();
    report->add_option("--out", out_dir, "directory for histograms.csv and crosstab.csv");

    auto* validate_cmd = app.add_subcommand("validate", "check a configuration without running it");
    validate_cmd->add_option("config", config_arg, "preset name or JSON config path")->required();
    validate_cmd->add_option("--set", sets, "override a config field");

    std::string preset;
    auto* presets = app.add_subcommand("presets", "list bundled presets, or print one as JSON");
    presets->add_option("name", preset, "preset to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_arg, reps, seed, workers, out_dir, trace, sets);
        if (*report) return cmd_report(runs_path, out_dir);
        if (*validate_cmd) return cmd_validate(config_arg, sets);
        if (*presets) {
            if (preset.empty())
                for (const auto& n : preset_names()) std::cout << n << '\n';
            else
                std::cout << preset_document(preset).dump(2) << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
