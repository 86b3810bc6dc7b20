#pragma once

namespace gek::cli {

// Full command-line entry point (subcommands: density | kernel | check |
// sample).  Returns the process exit code: 0 success, 2 usage error,
// 3 numeric/statistical failure.
int run(int argc, const char* const* argv);

} // namespace gek::cli
