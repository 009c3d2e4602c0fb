#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "cevlab/config.hpp"

namespace cevlab {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitValidation = 2,
    kExitRuntime = 3,
};

/// Runs the configured experiment, writes its report to
/// config.resolved_output_path() ("-" = `out`) and prints a one-line summary.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// `cevlab <experiment> [--config <file>] [--dry-run] [--section.key=value ...]`.
/// `args` excludes the program name.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace cevlab
