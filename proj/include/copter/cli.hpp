#pragma once

namespace copter {

// Entry point for the `copter` executable. Exit codes: 0 success, 1 usage
// error, 2 data or model error.
int run_cli(int argc, const char* const* argv);

}  // namespace copter
