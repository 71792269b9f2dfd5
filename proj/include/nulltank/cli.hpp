#pragma once

namespace nulltank {

/// Command line entry point (also driven directly by tests).
/// Exit codes: 0 success, 1 passivity or run failure, 2 configuration error,
/// 3 singularity abort.
int run_cli(int argc, const char* const* argv);

}  // namespace nulltank
