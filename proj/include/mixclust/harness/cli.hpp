#pragma once

#include <iosfwd>

namespace mixclust::harness {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

// Entry point of the mixclust command line tool.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mixclust::harness
