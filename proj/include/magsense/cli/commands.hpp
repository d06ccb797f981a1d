#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace magsense::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitBadParameters = 2,
  kExitVerificationFailed = 3,
};

/// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_command(int argc, const char* const* argv);

/// --threads, else MAGNON_SENSE_THREADS, else the hardware concurrency (at least 1).
unsigned resolve_threads(int requested);

}  // namespace magsense::cli
