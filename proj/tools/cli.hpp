#pragma once

#include <iosfwd>

namespace symlat {

/// Runs the command-line interface; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace symlat
