#pragma once

#include <iosfwd>

namespace entailloop {

/// Command-line entry point. Exit codes: 0 success, 1 usage or
/// configuration error, 2 data error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace entailloop
