// The `isskit` command line: compile, run, trace-dump, bench, assemble.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isskit::bench {

// Returns the process exit code. Normal output goes to `out`, diagnostics
// to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isskit::bench
