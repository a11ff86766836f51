#include "commands.hpp"

#include "kakinuma/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <utility>

int main(int argc, char** argv) {
    CLI::App app{"kakinuma_lab: two-layer Kakinuma model laboratory"};
    app.require_subcommand(1);
    std::string config, out;
    int threads = 1;
    std::uint64_t seed = 0;
    const std::pair<const char*, const char*> subs[] = {
        {"simulate", "integrate the Kakinuma system and record a trajectory"},
        {"prepare-init", "reconstruct the layer potentials from (zeta, phi, b)"},
        {"consistency", "delta sweep of residuals and Hamiltonian error against the full problem"},
        {"hamiltonian", "Kakinuma and full Hamiltonians for the initial state"},
        {"dispersion", "linear dispersion relation against the full model"},
        {"stability-report", "stability function, margins and quadratic form check"},
    };
    for (const auto& [name, help] : subs) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "INI configuration file")->required();
        sub->add_option("--out", out, "output directory (overrides [output] directory)");
        sub->add_option("--threads", threads, "worker threads for sweep points")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "seed for randomized checks");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : lab::kConfig;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return lab::run_command(name, lab::make_context(config, out, threads, seed));
    } catch (const kakinuma::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return lab::kConfig;
    }
}
