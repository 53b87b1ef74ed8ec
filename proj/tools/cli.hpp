#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace helium::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kIoError = 1,       ///< also used for usage errors
    kDynamicsFailure = 2,
    kDegenerateInput = 3,
};

/// Runs the command line `args` (without the program name). Data goes to
/// `out`, diagnostics and progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace helium::cli
