#pragma once

#include <iosfwd>

namespace fairrank {

// Dispatches the fairrank CLI. Exit codes: 0 success, 1 usage error,
// 2 data or solver error. Output streams are injectable for tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fairrank
