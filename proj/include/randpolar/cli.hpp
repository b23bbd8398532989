#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "randpolar/config.hpp"
#include "randpolar/experiments.hpp"

namespace randpolar
{

enum ExitCode : int
{
    kExitPass = 0,
    kExitFail = 1,
    kExitConfig = 2,
    kExitIo = 3
};

struct CliInvocation
{
    std::string command;
    std::string config_path;  // empty: command defaults, where the command has them
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> budget;
    unsigned threads = 1;
};

const std::vector<std::string>& cli_commands();

/*!
 * Applies the overrides to a raw config, parses it and runs the command.
 * The report echoes the parsed config, so rerunning it reproduces the
 * report. Throws ConfigError or InfeasibleError.
 */
ExperimentReport run_command_report(const std::string& command, Json config,
                                    std::optional<std::uint64_t> seed,
                                    std::optional<std::uint64_t> budget, unsigned threads = 1);

// Runs, writes report.json, trials.csv and any extra CSVs into out_dir, and
// prints a one-line summary. Returns an ExitCode.
int run_command(const CliInvocation& inv, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace randpolar
