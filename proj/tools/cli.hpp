#pragma once

#include <ostream>

namespace fishtrack::cli {

/// Entry point shared by the executable and the tests.
/// Exit codes: 0 success, 1 input error, 2 internal error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fishtrack::cli
