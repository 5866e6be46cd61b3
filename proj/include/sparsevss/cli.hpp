#pragma once

#include <iosfwd>

namespace sparsevss::cli {

/// Parses argv, loads the configuration (defaults, then --config, then each
/// --override, then --seed/--trials), runs the chosen subcommand and writes
/// its CSVs plus a manifest into --out. Returns the process exit status.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparsevss::cli
