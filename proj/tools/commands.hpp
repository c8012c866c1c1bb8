// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixforge::cli {

enum ExitCode : int {
  kOk = 0,
  kBadArgs = 1,
  kIoFailure = 2,
  kInvalidRecipe = 3,
  kChecksFailed = 4,
};

/// Runs `mixforge <subcommand> ...`; args[0] is the program name.
/// Diagnostics go to `err`; data only ever goes to files.
int run(const std::vector<std::string>& args, std::ostream& err);

/// Worker count from MIXFORGE_THREADS (default 1).
int threads_from_env();

}  // namespace mixforge::cli
