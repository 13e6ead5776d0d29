#pragma once

#include <iosfwd>

namespace psdpath::cli {

enum ExitCode : int {
  kSuccess = 0,
  kPropertyViolation = 1,
  kInputError = 2,
};

/// Entry point of the psdpath command-line tool. Data goes to `out` (or the
/// --out file), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psdpath::cli
