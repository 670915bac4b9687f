#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace offlang::cli {

/// Runs the `offlang` command line. `args` excludes the program name. Returns
/// the process exit code; errors are reported on `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace offlang::cli
