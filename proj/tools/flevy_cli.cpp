#include <CLI11.hpp>

#include <iostream>

#include "flevy/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace flevy::cli;
    CLI::App app{"Fractional Levy process, FLOUP and transformed SDE simulation"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::uint64_t seed = 0;
    std::string kind, suite;
    std::vector<std::string> inputs;

    auto* sim = app.add_subcommand("simulate", "Simulate one path and write it as t,value CSV");
    sim->add_option("kind", kind, "driver, flp, floup or sde")->required();
    sim->add_option("--config", opts.config_path, "Configuration file")->required();
    sim->add_option("--out", opts.out_path, "Output CSV (default: standard output)");
    auto* sim_seed = sim->add_option("--seed", seed, "Seed overriding ensemble.seed");

    auto* ver = app.add_subcommand("verify", "Run a verification suite and print the check table");
    ver->add_option("suite", suite,
                    "covariance, lrd, langevin, sst_residual, appendix_calculus or gamma_identities")
        ->required();
    ver->add_option("--config", opts.config_path, "Configuration file");
    ver->add_option("--out", opts.out_path, "Write the table here instead of standard output");
    auto* ver_seed = ver->add_option("--seed", seed, "Seed overriding ensemble.seed");

    auto* plot = app.add_subcommand("plotdata", "Merge t,value CSV files into series,t,value");
    plot->add_option("inputs", inputs, "Input CSV files")->required();
    plot->add_option("--out", opts.out_path, "Output CSV (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    if (*sim_seed || *ver_seed) opts.seed = seed;
    if (sim->parsed()) return cmd_simulate(kind, opts, std::cout, std::cerr);
    if (ver->parsed()) return cmd_verify(suite, opts, std::cout, std::cerr);
    return cmd_plotdata(inputs, opts.out_path, std::cout, std::cerr);
}
