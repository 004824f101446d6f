#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wallenergy::cli {

// Dispatch one command line (without the program name) and stream results.
// CSV goes to `out` unless --out-dir redirects it into files; diagnostics
// and usage go to `err`. Returns 0 on success, 2 on an argument problem
// (unknown subcommand or flag, missing or unparsable value, bad config
// file), 1 when the underlying computation fails numerically.
//
// Every run prints its resolved configuration as `# key=value` comment
// lines, sorted by key, ahead of the CSV header. Identical invocations
// produce byte-identical output.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

} // namespace wallenergy::cli
