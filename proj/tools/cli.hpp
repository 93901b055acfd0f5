#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fretfrag::cli {

enum ExitStatus : int { kSuccess = 0, kDomainError = 1, kUsageError = 2 };

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Replaces `path` with `content` via a temporary file in the same
/// directory and a rename.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace fretfrag::cli
