#pragma once

#include <iosfwd>

namespace bandmatch::cli {

/// Entry point behind the `bandmatch` executable. Subcommands:
/// build-background, classify, band-select, binarize, eval, bench, serve.
/// Returns 0 on success, 1 on a processing failure and 2 on bad usage.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace bandmatch::cli
