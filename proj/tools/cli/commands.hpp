#pragma once

#include <ostream>

namespace hmg::cli {

enum ExitCode : int { Ok = 0, Validation = 2, Uncertified = 3, VerifyMismatch = 4 };

/// Entry point shared by main() and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hmg::cli
