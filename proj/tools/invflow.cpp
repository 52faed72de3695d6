// Command line front end: run, check-tangency, demo.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "invflow/demos.hpp"
#include "invflow/io.hpp"

namespace fs = std::filesystem;
using namespace invflow;

namespace {

constexpr int kExitInvariant = 0;
constexpr int kExitError = 2;
constexpr int kExitRefuted = 3;
constexpr int kExitExited = 4;

struct RunArgs {
    std::string scenario;
    std::string out = ".";
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::size_t cadence = 0;
    std::optional<double> exit_threshold;
};

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << body;
}

int cmd_run(const RunArgs& a) {
    std::optional<io::Mode> mode;
    if (!a.mode.empty()) mode = io::parse_mode(a.mode);
    const auto sc = io::load_scenario_file(a.scenario, mode, a.seed);

    SolveOptions opts;
    opts.cadence = a.cadence;
    opts.exit_threshold = a.exit_threshold;
    const auto r = io::run_scenario(sc, opts);

    fs::create_directories(a.out);
    const auto points = io::node_points(sc);
    {
        std::ofstream f(fs::path(a.out) / "trajectory.csv", std::ios::binary);
        io::write_trajectory_csv(f, r.trajectory, points);
    }
    {
        std::ofstream f(fs::path(a.out) / "diagnostics.csv", std::ios::binary);
        io::write_diagnostics_csv(f, r.verdict, points.front().size());
    }
    auto verdict = io::to_json(r);
    verdict["mode"] = io::to_string(sc.mode);
    write_file(fs::path(a.out) / "verdict.json", verdict.dump(2) + "\n");

    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (r.failed) {
        std::cerr << "error: " << r.failure << "\n";
        return kExitError;
    }
    std::cout << diag::to_string(r.verdict.status) << " worst_dist=" << r.verdict.worst_dist << "\n";
    return r.verdict.status == diag::Status::invariant ? kExitInvariant : kExitExited;
}

int cmd_check(const std::string& path, const std::string& mode_name, std::optional<std::uint64_t> seed) {
    std::optional<io::Mode> mode;
    if (!mode_name.empty()) mode = io::parse_mode(mode_name);
    const auto sc = io::load_scenario_file(path, mode, seed);
    const auto report = io::check_scenario_tangency(sc);
    std::cout << io::to_json(report).dump(2) << "\n";
    return report.certified ? kExitInvariant : kExitRefuted;
}

int cmd_demo(const std::string& name, bool print_scenario) {
    if (print_scenario) {
        const auto j = demos::scenario(name);
        if (!j) throw InvalidArgument("demo '" + name + "' has no scenario file");
        std::cout << j->dump(2) << "\n";
        return 0;
    }
    return demos::run(name, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariant-region workbench for reaction-diffusion systems"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Integrate a scenario and monitor invariance");
    run->add_option("--scenario", run_args.scenario, "Scenario JSON file")->required();
    run->add_option("--out", run_args.out, "Output directory")->capture_default_str();
    run->add_option("--mode", run_args.mode, "flat or bundle (overrides the scenario)");
    run->add_option("--seed", run_args.seed, "Seed for randomized sampling");
    run->add_option("--cadence", run_args.cadence, "Monitor every K steps (0 = automatic)");
    run->add_option("--exit-threshold", run_args.exit_threshold, "Distance above which W counts as left");

    std::string check_path, check_mode;
    std::optional<std::uint64_t> check_seed;
    auto* check = app.add_subcommand("check-tangency", "Sampled tangency check of the reaction term");
    check->add_option("--scenario", check_path, "Scenario JSON file")->required();
    check->add_option("--mode", check_mode, "flat or bundle (overrides the scenario)");
    check->add_option("--seed", check_seed, "Seed for boundary sampling");

    std::string demo_name;
    bool print_scenario = false;
    auto* demo = app.add_subcommand("demo", "Run a packaged demo");
    demo->add_option("name", demo_name, "logistic-neumann | dirichlet-exit | bundle-rotation | dini-lemma | fhn-rectangle")
        ->required();
    demo->add_flag("--print-scenario", print_scenario, "Print the demo scenario JSON instead of running it");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*run) return cmd_run(run_args);
        if (*check) return cmd_check(check_path, check_mode, check_seed);
        if (*demo) return cmd_demo(demo_name, print_scenario);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
