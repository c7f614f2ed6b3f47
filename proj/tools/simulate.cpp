// simulate <scenario.json> [--seed N] [--paths N] [--paths-dump K] [--out DIR]

#include <CLI11.hpp>

#include <iostream>

#include "insider/cli/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo valuation of anticipative regime information"};
    std::string scenario_path;
    insider::cli::RunOptions opts;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::string out_dir;
    app.add_option("scenario", scenario_path, "scenario JSON file")->required();
    auto* seed_opt = app.add_option("--seed", seed, "override the scenario seed");
    auto* paths_opt = app.add_option("--paths", paths, "override the number of paths")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
    app.add_option("--paths-dump", opts.paths_dump, "write the first K paths to paths.csv");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    CLI11_PARSE(app, argc, argv);

    if (*seed_opt) opts.seed = seed;
    if (*paths_opt) opts.paths = paths;
    if (*out_opt) opts.out_dir = out_dir;

    try {
        return insider::cli::run(insider::cli::parse_scenario(scenario_path), opts);
    } catch (const insider::cli::ScenarioError& ex) {
        std::cerr << ex.what() << "\n";
        return insider::cli::kExitInvalid;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return insider::cli::kExitInvalid;
    }
}
