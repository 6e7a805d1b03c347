#pragma once

#include <string>
#include <vector>

namespace gp::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,      // unexpected runtime error
  kExitConfig = 2,       // bad flags, missing inputs, unusable configuration
  kExitNoSamples = 3,    // generate produced nothing
  kExitUnreachable = 4,  // model endpoint unreachable
  kExitNoBaseline = 5,   // analyze found no baseline predictions
};

/// Entry point of the gui-perturb binary; args[0] is the program name.
/// `--config FILE` loads a JSON object whose keys are long option names of
/// the chosen subcommand; flags given on the command line win.
int run(const std::vector<std::string>& args);

}  // namespace gp::cli
