// SPDX-License-Identifier: Apache-2.0
//
// `oddkit` command line. Exit codes:
//   0 success
//   1 diagnostics with errors, or a domain error (rejected input, empty stratum, ...)
//   2 usage error: bad flags, unknown names, unreadable inputs, refused overwrite
//   3 internal error
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace oddkit::cli {

enum ExitCode : int { kOk = 0, kDiagnostics = 1, kUsage = 2, kInternal = 3 };

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oddkit::cli
