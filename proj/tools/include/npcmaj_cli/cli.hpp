#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace npcmaj::cli {

enum ExitCode : int { kHolds = 0, kViolated = 1, kBadInput = 2, kNotConverged = 3 };

/// Runs one invocation; `args` excludes the program name. The report goes to
/// `out` (or to --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string content_digest(const std::string& bytes);

}  // namespace npcmaj::cli
