#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tidal::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kInputError = 2, kTruncated = 3 };

/// Runs the tidal command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a,b,c" or "start:stop:count" (count values, both ends included).
std::vector<double> parse_alpha_list(const std::string& text);

}  // namespace tidal::cli
