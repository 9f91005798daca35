#pragma once

#include <iosfwd>

namespace tmas {

/// Exit codes: 0 success, 1 invalid input or internal error, 2 infeasible,
/// 3 resource budget exceeded, 4 simulation or membership check failed.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tmas
