#pragma once

#include <iosfwd>

namespace p2k {

/// Subcommands: index build|inspect, query, eval, synth, serve.
/// Returns 0 on success, 2 on usage errors, 1 on runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace p2k
