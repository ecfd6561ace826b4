#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dendrix::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 1;
inline constexpr int kUsage = 2;

/// Runs one command. `args` excludes the program name, e.g. {"space", "gen", "--kind", "cantor"}.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes `content` to a temporary sibling of `path`, then renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace dendrix::cli
