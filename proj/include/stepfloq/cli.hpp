#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stepfloq {

enum ExitCode : int {
    exit_ok = 0,
    exit_verify_failed = 1,
    exit_config = 2,
    exit_io = 3,
    exit_numerical = 4,
};

/// Runs the command line `args` (without the program name).
/// Subcommands: bands, scan, path, verify, energies.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stepfloq
