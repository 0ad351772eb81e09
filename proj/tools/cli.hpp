#pragma once

#include <ostream>

namespace eqloc::cli {

// Exit codes: 0 every check as expected, 1 some check not as expected or a
// runtime failure, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eqloc::cli
