#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace sdgp::cli {

/// Exit codes of run().
enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

/// Runs one subcommand. args excludes the program name. Artifacts go to
/// --output (or `out`); summaries go to `out` when --output is set and to
/// `err` otherwise; progress lines always go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

int run(int argc, const char* const* argv);

}  // namespace sdgp::cli
