#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pntlab {

inline constexpr const char* kToolVersion = "0.1.0";

// Keys: eps, cache, budget. Missing keys get their defaults (eps=0.1,
// cache unset, budget=10000000). Blank lines and '#' comments are skipped.
// Throws InvalidArgument naming the offending line.
std::map<std::string, std::string> validate_config(std::string_view text);

struct RunOutcome {
  int exit_code = 0;
  std::string output;       // report text (JSON or CSV), empty with --out
  std::string diagnostics;  // usage and error messages
};

// argv[0] is the program name. Never throws.
RunOutcome run(const std::vector<std::string>& argv);

// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

}  // namespace pntlab
