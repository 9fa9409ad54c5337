#pragma once

#include <iosfwd>

namespace ccopf::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kSolverFailure = 3 };

// Entry point of the `ccopf` tool. Subcommands: run, nsamples, sweep1d,
// validate. CCOPF_SEED in the environment overrides --seed.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ccopf::cli
