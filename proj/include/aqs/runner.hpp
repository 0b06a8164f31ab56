#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "aqs/config.hpp"

namespace aqs {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,         // output could not be written, or an unexpected failure
  kExitParse = 2,      // bad command line, config or input file
  kExitNumerical = 3,  // integrator/eigensolver failure
  kExitInvariant = 4,  // a runtime invariant check failed
};

struct RunOutcome {
  std::vector<std::filesystem::path> files;
};

// Executes the experiment and writes its outputs (CSV plus a JSON metadata
// sidecar, or a JSON report for `validate`). All computation happens before
// any file is touched, and each file is written atomically. Throws on
// failure; see exit_code_for.
RunOutcome run(const ExperimentConfig& config);

// Maps the in-flight exception to an ExitCode and prints it to `err`.
int exit_code_for_current_exception(std::ostream& err);

// run() with errors reported on `err` and turned into an exit code.
int run_and_report(const ExperimentConfig& config, std::ostream& err);

}  // namespace aqs
