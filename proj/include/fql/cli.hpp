#pragma once

#include <iosfwd>

namespace fql {

// Entry point for the command line tool; returns the process exit code.
// Output lines go to `out` (and to --out when given).
int cli_main(int argc, const char* const* argv, std::ostream& out);

}  // namespace fql
