#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "atm/common.hpp"
#include "atm/planner.hpp"
#include "atm/simlab/config.hpp"
#include "atm/simlab/experiments.hpp"

namespace {

constexpr int kExitCriteriaFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::string experiment_list() {
    std::string out;
    for (const auto& name : atm::simlab::experiment_names()) {
        if (!out.empty()) out += ", ";
        out += name;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active thinking agent runtime and simulation lab"};
    app.require_subcommand(1);

    std::string experiment;
    std::string config_path;
    std::string seeds;
    std::string out_dir = "out";
    std::int64_t timeout_ms = atm::kDefaultPlannerTimeoutMs;
    std::size_t threads = atm::simlab::default_threads();

    auto* run = app.add_subcommand("run", "Run one experiment and write CSV traces plus a summary");
    run->add_option("experiment", experiment, "One of: " + experiment_list())->required();
    run->add_option("--config", config_path, "JSON config file; defaults apply when omitted")
        ->check(CLI::ExistingFile);
    run->add_option("--seeds", seeds, "Seed count n (seeds 0..n-1) or a comma-separated list");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--planner-timeout-ms", timeout_ms, "External planner timeout (with ATM_PLANNER_URL)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run->add_option("--threads", threads, "Worker threads for the seed fan-out")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    app.add_subcommand("list", "List the available experiments")->callback([] {
        for (const auto& name : atm::simlab::experiment_names()) std::printf("%s\n", name.c_str());
    });

    CLI11_PARSE(app, argc, argv);
    if (!run->parsed()) return 0;

    atm::simlab::SimConfig cfg;
    try {
        cfg = config_path.empty() ? atm::simlab::parse_config(atm::simlab::json::object())
                                  : atm::simlab::load_config(config_path);
        if (!seeds.empty()) cfg.seeds = atm::simlab::parse_seeds(seeds);
    } catch (const atm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    }

    atm::simlab::RunOptions opts;
    opts.threads = threads;
    opts.planner_timeout = std::chrono::milliseconds(timeout_ms);

    try {
        const auto start = std::chrono::steady_clock::now();
        const auto report = atm::simlab::run_experiment(experiment, cfg, opts);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        atm::simlab::write_report(report, out_dir);

        std::printf("%s: %zu seeds in %.2f s, output in %s\n", report.experiment.c_str(), report.seeds.size(),
                    seconds, std::filesystem::path(out_dir).string().c_str());
        for (const auto& c : report.criteria) {
            std::printf("  [%s] %s = %.6g (threshold %.6g) %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                        c.value, c.threshold, c.detail.c_str());
        }
        return report.passed() ? 0 : kExitCriteriaFailed;
    } catch (const atm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
