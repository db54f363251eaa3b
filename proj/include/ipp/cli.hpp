#pragma once

namespace ipp {

// Entry point for the `ipp` command line. Exit codes: 0 success, 1 config
// error, 2 runtime error.
int run_cli(int argc, const char* const* argv);

}  // namespace ipp
