#pragma once

#include "config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace lab {

enum ExitCode { kOk = 0, kConfig = 1, kInstability = 2, kSolver = 3 };

struct Context {
    RunConfig cfg;
    std::string config_sha1;
    std::filesystem::path out;
    int threads = 1;
    std::uint64_t seed = 0;
};

Context make_context(const std::string& config_path, const std::string& out_override, int threads,
                     std::uint64_t seed);

int cmd_simulate(const Context& ctx);
int cmd_prepare_init(const Context& ctx);
int cmd_consistency(const Context& ctx);
int cmd_hamiltonian(const Context& ctx);
int cmd_dispersion(const Context& ctx);
int cmd_stability_report(const Context& ctx);

// Runs a subcommand by name, mapping library errors to the exit-code contract.
int run_command(const std::string& name, const Context& ctx);

}  // namespace lab
